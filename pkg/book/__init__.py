"""Total order book: visible limit book, resting market orders and latent orders"""

from .order_book import (
    LatentRule,
    MatchOutcome,
    Order,
    OrderKind,
    OrderRejected,
    Side,
    TotalOrderBook,
    Trade,
    from_ticks,
    quantize_price,
    to_ticks,
)
from .reference_matcher import ReferenceMatcher
from .tape import TAPE_COLUMNS, read_tape_csv, tape_to_frame, write_tape_csv

__all__ = [
    "LatentRule",
    "MatchOutcome",
    "Order",
    "OrderKind",
    "OrderRejected",
    "ReferenceMatcher",
    "Side",
    "TAPE_COLUMNS",
    "TotalOrderBook",
    "Trade",
    "from_ticks",
    "quantize_price",
    "read_tape_csv",
    "tape_to_frame",
    "to_ticks",
    "write_tape_csv",
]
