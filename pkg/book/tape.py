"""
Trade tape serialization.

CSV layout: trade_id,time,price,qty,buyer_id,seller_id,aggressor
with time printed to 9 decimals and price to 2.
"""

import logging
from pathlib import Path
from typing import List, Sequence, Union

import pandas as pd

from .order_book import Side, Trade

logger = logging.getLogger(__name__)

TAPE_COLUMNS = ["trade_id", "time", "price", "qty", "buyer_id", "seller_id", "aggressor"]


def tape_to_frame(trades: Sequence[Trade]) -> pd.DataFrame:
    """Tabular view of a tape (numeric columns, unformatted)."""
    return pd.DataFrame(
        {
            "trade_id": [t.trade_id for t in trades],
            "time": [t.time for t in trades],
            "price": [t.price for t in trades],
            "qty": [t.quantity for t in trades],
            "buyer_id": [t.buyer_trader_id for t in trades],
            "seller_id": [t.seller_trader_id for t in trades],
            "aggressor": [t.aggressor_side.value for t in trades],
        },
        columns=TAPE_COLUMNS,
    )


def write_tape_csv(trades: Sequence[Trade], path: Union[str, Path]) -> Path:
    """
    Write a trade tape.

    Args:
        trades: Executed trades in tape order
        path: Destination file

    Returns:
        The written path
    """
    frame = tape_to_frame(trades)
    frame["time"] = frame["time"].map(lambda t: f"{t:.9f}")
    frame["price"] = frame["price"].map(lambda p: f"{p:.2f}")

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, lineterminator="\n")
    logger.info(f"Wrote {len(trades)} trades to {path}")
    return path


def read_tape_csv(path: Union[str, Path]) -> List[Trade]:
    """
    Read a tape written by `write_tape_csv`.

    Order ids are not part of the file and come back as -1.
    """
    frame = pd.read_csv(path, dtype={"aggressor": str})
    return [
        Trade(
            trade_id=int(row.trade_id),
            time=float(row.time),
            price=float(row.price),
            quantity=int(row.qty),
            buyer_trader_id=int(row.buyer_id),
            seller_trader_id=int(row.seller_id),
            aggressor_side=Side(row.aggressor),
        )
        for row in frame.itertuples(index=False)
    ]
