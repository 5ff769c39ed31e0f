"""
Levy Auction - CLI de Simulação e Análise

Interface de linha de comando para o simulador de leilão duplo contínuo
com busca de Lévy e para as ferramentas analíticas.

Features:
- simulate: um experimento (fita de negócios, eficiência, log de eventos)
- sweep: grade de taxas de eventos x gammas x viés, com relatório estatístico
- analytics: propagadores, função de escala, Cauchy, densidade, superfícies, MSD
- Manifesto JSON com configuração, sementes e arquivos gerados
- Modo debug

Usage:
    python main.py simulate --config default --seed 7
    python main.py sweep --config desk_scale --jobs 4 --report
    python main.py analytics cauchy --u0 1 --t 1 --x 0
    python main.py analytics surface --grid low-latency --output surface.csv
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np
import pandas as pd
from dotenv import load_dotenv
from rich.console import Console
from rich.logging import RichHandler
from rich.panel import Panel
from rich.table import Table

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent))

from agents import ExponentialFlightTimeDist, FlightTimeDist, VelocityDist, make_rng
from analytics import (
    SURFACE_GRIDS,
    DiracMass,
    GaussianBump,
    GaussianSource,
    InflowSource,
    InterauctionParams,
    ScenarioParams,
    SearchModel,
    ballistic_scaling_function,
    cauchy_propagator,
    evaluate_field,
    high_reaction_density,
    impact_source,
    interauction_density,
    large_demand_density,
    make_grid,
    master_density,
    multiplying_factor_surface,
    propagator_grid,
    steady_state_density,
    surface_to_frame,
    sustained_inflow_density,
)
from book import write_tape_csv
from simulation import (
    SimConfig,
    build_report,
    env_seed,
    msd_of_quotes,
    run_sweep,
    simulate_levy_walks,
    sweep_from_mapping,
)
from simulation.engine import MarketSimulator
from utils import QuadratureError, RunManifest, load_config, parse_overrides, read_frame, write_frame

# Load environment variables from .env file
load_dotenv()

console = Console(stderr=True)
logger = logging.getLogger("levy_auction")

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2


def setup_logging(debug: bool) -> None:
    """Route all logging through rich."""
    logging.basicConfig(
        level=logging.DEBUG if debug else logging.INFO,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=console, rich_tracebacks=debug, show_path=debug)],
        force=True,
    )


class AuctionCLI:
    """
    Command dispatcher for simulate / sweep / analytics.

    Every command returns an exit code: 0 success, 1 runtime failure,
    2 configuration or flag error.
    """

    def __init__(self, debug: bool = False):
        """
        Initialize CLI.

        Args:
            debug: Enable debug mode (DEBUG logs and tracebacks)
        """
        self.debug = debug

    # ------------------------------------------------------------------
    # Helpers
    # ------------------------------------------------------------------

    def _config_values(self, args) -> Dict[str, str]:
        """Defaults < LEVY_AUCTION_SEED < config file < CLI flags."""
        values: Dict[str, str] = {}
        seed = env_seed()
        if seed is not None:
            values["seed"] = str(seed)
        config = "paper_grid" if getattr(args, "paper_grid", False) else args.config
        if getattr(args, "desk_scale", False):
            config = "desk_scale"
        if config:
            values.update(load_config(config))

        flags = {
            "seed": getattr(args, "seed", None),
            "event_rate": getattr(args, "event_rate", None),
            "gamma": getattr(args, "gamma", None),
            "n_traders": getattr(args, "n_traders", None),
        }
        values.update({k: str(v) for k, v in flags.items() if v is not None})
        values.update(parse_overrides(args.set or []))
        return values

    def _fail(self, manifest: Optional[RunManifest], manifest_path: Optional[Path], code: int, error: Exception) -> int:
        message = f"{type(error).__name__}: {error}"
        logger.error(message)
        if code == EXIT_CONFIG:
            console.print(f"[red]Erro de configuração: {error}[/red]")
        else:
            console.print(f"[red]Erro durante a execução: {error}[/red]")
            if self.debug:
                console.print_exception()
        if manifest is not None and manifest_path is not None:
            manifest.finish("error", message)
            manifest.write(manifest_path)
        return code

    def _guarded(self, action, manifest: Optional[RunManifest] = None, manifest_path: Optional[Path] = None) -> int:
        try:
            return action()
        except QuadratureError as e:
            return self._fail(manifest, manifest_path, EXIT_RUNTIME, e)
        except ValueError as e:
            return self._fail(manifest, manifest_path, EXIT_CONFIG, e)
        except Exception as e:
            return self._fail(manifest, manifest_path, EXIT_RUNTIME, e)

    # ------------------------------------------------------------------
    # simulate
    # ------------------------------------------------------------------

    def cmd_simulate(self, args) -> int:
        """Run one trial and write tape, efficiency report, logs and manifest."""
        output_dir = Path(args.output_dir)
        manifest = RunManifest(command_line=" ".join(sys.argv))
        manifest_path = output_dir / "manifest.json"

        def action() -> int:
            config = SimConfig.from_mapping(self._config_values(args))
            manifest.config_snapshot = config.to_mapping()
            manifest.seeds = [config.seed]

            with console.status("[bold green]Simulando leilão..."):
                result = MarketSimulator(config, record_events=args.events).run()

            manifest.add_output(write_tape_csv(result.trades, output_dir / "tape.csv"))
            report_row = {"seed": config.seed, "event_rate": config.event_rate, "gamma": config.gamma,
                          "bias": config.bias.value, "end_reason": result.end_reason,
                          **result.report.to_row(), "lag1_autocorr": result.lag1_autocorrelation()}
            manifest.add_output(write_frame(pd.DataFrame([report_row]), output_dir / "efficiency.csv"))
            if args.events:
                manifest.add_output(write_frame(pd.DataFrame(result.events), output_dir / "events.csv"))
            if args.walk_log:
                manifest.add_output(write_frame(result.quote_walk_log(), output_dir / "walk_log.csv"))

            manifest.finish("success")
            manifest.write(manifest_path)
            self._show_trial(result)
            return EXIT_OK

        return self._guarded(action, manifest, manifest_path)

    def _show_trial(self, result) -> None:
        report = result.report
        table = Table(title="Resultado do Experimento", show_header=True, header_style="bold magenta")
        table.add_column("Métrica", style="cyan")
        table.add_column("Valor", style="green")
        table.add_row("Semente", str(result.config.seed))
        table.add_row("Eventos", str(result.n_events))
        table.add_row("Motivo do fim", result.end_reason)
        table.add_row("Negócios", str(report.n_trades))
        table.add_row("Eficiência <1/τ>", f"{report.efficiency:.6g}")
        table.add_row("Eficiência / taxa", f"{report.efficiency_per_rate:.6g}")
        table.add_row("Eficiência (durações > 0)", f"{report.efficiency_positive:.6g}")
        table.add_row("Negócios por evento", f"{report.trades_per_event:.6g}")
        table.add_row("Fração de ruído", f"{result.noise_fraction:.3f}")
        if report.flagged:
            table.add_row("Aviso", "menos de 2 negócios")
        console.print(table)

    # ------------------------------------------------------------------
    # sweep
    # ------------------------------------------------------------------

    def cmd_sweep(self, args) -> int:
        """Run the experiment grid and write summary tables."""
        output_dir = Path(args.output_dir)
        manifest = RunManifest(command_line=" ".join(sys.argv))
        manifest_path = output_dir / "manifest.json"

        def action() -> int:
            values = self._config_values(args)
            if args.trials is not None:
                values["trials"] = str(args.trials)
            if args.seed is not None and "base_seed" not in parse_overrides(args.set or []):
                values["base_seed"] = values.pop("seed")
            elif "seed" in values and "base_seed" not in values:
                values["base_seed"] = values.pop("seed")
            grid, base = sweep_from_mapping(values)
            manifest.config_snapshot = {**values, **base.to_mapping()}

            with console.status(f"[bold green]Executando {grid.size} experimentos...") as status:
                def progress(done: int, total: int) -> None:
                    status.update(f"[bold green]Experimentos: {done}/{total}")

                result = run_sweep(grid, base, jobs=args.jobs, progress=progress)

            manifest.seeds = [int(s) for s in result.diagnostics["seed"]]
            manifest.add_output(write_frame(result.trials, output_dir / "summary.csv"))
            manifest.add_output(write_frame(result.cells, output_dir / "cells.csv"))
            manifest.add_output(write_frame(result.diagnostics, output_dir / "diagnostics.csv"))

            if args.report:
                report = build_report(result.diagnostics)
                manifest.add_output(write_frame(report, output_dir / "report.csv"))
                self._show_report(report)

            self._show_cells(result.cells)
            if result.failures:
                console.print(f"[yellow]{len(result.failures)} experimento(s) falharam e foram ignorados[/yellow]")
            manifest.finish("success")
            manifest.write(manifest_path)
            return EXIT_OK

        return self._guarded(action, manifest, manifest_path)

    def _show_cells(self, cells: pd.DataFrame) -> None:
        table = Table(title="Eficiência por Célula", show_header=True, header_style="bold magenta")
        for column in ("Taxa", "γ", "Viés", "Experimentos", "Eficiência (média)", "Desvio"):
            table.add_column(column, style="cyan" if column in ("Taxa", "γ", "Viés") else "green")
        for row in cells.itertuples(index=False):
            table.add_row(f"{row.event_rate:g}", f"{row.gamma:g}", str(row.bias), str(row.n_trials),
                          f"{row.efficiency_mean:.6g}", f"{row.efficiency_std:.3g}")
        console.print(table)

    def _show_report(self, report: pd.DataFrame) -> None:
        table = Table(title="Relatório Estatístico", show_header=True, header_style="bold magenta")
        for column in ("Verificação", "Taxa", "Comparação", "Estatística", "p", "Status"):
            table.add_column(column)
        for row in report.itertuples(index=False):
            status = "[green]ok[/green]" if row.passed else "[red]falhou[/red]"
            rate = "-" if pd.isna(row.event_rate) else f"{row.event_rate:g}"
            p_value = "-" if pd.isna(row.p_value) else f"{row.p_value:.3g}"
            table.add_row(row.check, rate, row.comparison, f"{row.statistic:.4g}", p_value, status)
        console.print(table)

    # ------------------------------------------------------------------
    # analytics
    # ------------------------------------------------------------------

    def cmd_analytics(self, args) -> int:
        """Dispatch an analytics subcommand and emit its CSV."""
        handlers = {
            "propagator": self._propagator,
            "scaling": self._scaling,
            "cauchy": self._cauchy,
            "density": self._density,
            "surface": self._surface,
            "msd": self._msd,
        }
        output = Path(args.output) if args.output else None
        manifest = RunManifest(command_line=" ".join(sys.argv)) if output else None
        manifest_path = output.with_name(f"{output.stem}.manifest.json") if output else None

        def action() -> int:
            frame = handlers[args.analytics_command](args)
            written = write_frame(frame, output)
            if manifest is not None:
                manifest.config_snapshot = {k: str(v) for k, v in vars(args).items() if k not in ("func",)}
                manifest.add_output(written)
                manifest.finish("success")
                manifest.write(manifest_path)
            return EXIT_OK

        return self._guarded(action, manifest, manifest_path)

    def _search_model(self, args) -> SearchModel:
        flight = ExponentialFlightTimeDist(rate=args.rate) if args.exponential else FlightTimeDist(gamma=args.gamma)
        return SearchModel(velocity=VelocityDist(u0=args.u0, v_max=args.v_max), flight=flight)

    def _propagator(self, args) -> pd.DataFrame:
        model = self._search_model(args)
        ks = make_grid(args.k_min, args.k_max, args.k_count, args.k_scale)
        ss = make_grid(args.s_min, args.s_max, args.s_count, args.s_scale)
        with console.status("[bold green]Calculando propagador..."):
            return propagator_grid(model, ks, ss, args.form, args.method, asymptotic=args.asymptotic)

    def _scaling(self, args) -> pd.DataFrame:
        model = self._search_model(args)
        rows = []
        with console.status("[bold green]Extrapolando a função de escala..."):
            ys = args.y if args.y else make_grid(args.y_min, args.y_max, args.y_count)
            for y in ys:
                estimate = ballistic_scaling_function(model, float(y))
                rows.append({"y": estimate.y, "phi": estimate.value,
                             **{f"raw_eps_{eps:g}": raw for eps, raw in zip(estimate.epsilons, estimate.raw)},
                             "monotone": estimate.monotone})
        frame = pd.DataFrame(rows)
        if not frame["monotone"].all():
            console.print("[yellow]Extrapolação não monotônica em alguns pontos (ver coluna monotone)[/yellow]")
        return frame

    def _cauchy(self, args) -> pd.DataFrame:
        xs, ts = np.meshgrid(np.asarray(args.x, dtype=float), np.asarray(args.t, dtype=float), indexing="ij")
        values = cauchy_propagator(args.u0, xs, ts)
        return pd.DataFrame({"x": xs.ravel(), "t": ts.ravel(), "value": np.ravel(values)})

    def _scenario(self, args) -> ScenarioParams:
        return ScenarioParams(D=args.D, lambda1=args.lambda1, lambda2=args.lambda2, v=args.v, v1=args.v1,
                              phi2=args.phi2, v_star=args.v_star, B=args.B, c=args.c)

    def _initial(self, args):
        if args.sigma > 0:
            return GaussianBump(mass=args.mass, x0=args.x0, sigma=args.sigma)
        return DiracMass(mass=args.mass, x0=args.x0)

    def _density(self, args) -> pd.DataFrame:
        scenario = args.scenario
        if scenario == "interauction":
            params = InterauctionParams(B=args.B, D=args.D, v_star=args.v_star, tau=args.tau, omega=args.omega,
                                        lambda2_star=args.lambda2, lambda1_star=args.lambda1, phi2_star=args.phi2)
            factor = interauction_density(params, args.regime)
            return pd.DataFrame([{"B": args.B, "tau": args.tau, "factor": factor}])
        if scenario == "surface":
            B_grid, tau_grid = SURFACE_GRIDS[args.grid]
            return surface_to_frame(B_grid, tau_grid, multiplying_factor_surface(B_grid, tau_grid, args.D, args.v_star))

        params = self._scenario(args)
        xs = make_grid(args.x_min, args.x_max, args.x_count)
        ts = args.t

        if scenario == "steady":
            values = steady_state_density(params, impact_source(args.x0, args.D), xs)
            return pd.DataFrame({"x": xs, "t": np.inf, "value": values})

        source = None
        if args.source_rate:
            source = (GaussianSource(rate=args.source_rate, x0=args.x0, sigma=args.sigma) if args.sigma > 0
                      else InflowSource(rate=args.source_rate, x0=args.x0))

        evaluators = {
            "master": lambda x, t: master_density(params, source, x, t, initial=self._initial(args)),
            "large-demand": lambda x, t: large_demand_density(params, args.mass, x, t),
            "inflow": lambda x, t: sustained_inflow_density(params, args.phi2, x, t, args.inflow_regime, args.x0),
            "high-reaction": lambda x, t: high_reaction_density(params, self._initial(args), x, t),
        }
        with console.status("[bold green]Avaliando densidade..."):
            field = evaluate_field(evaluators[scenario], xs, ts)
        if field.min_value < 0:
            logger.warning(f"Negative density values (min {field.min_value:.3e})")
        return field.to_frame()

    def _surface(self, args) -> pd.DataFrame:
        B_grid, tau_grid = SURFACE_GRIDS[args.grid]
        surface = multiplying_factor_surface(B_grid, tau_grid, args.D, args.v_star)
        if args.layout == "long":
            return surface_to_frame(B_grid, tau_grid, surface)
        matrix = pd.DataFrame(surface, columns=[f"{tau:.6g}" for tau in tau_grid])
        matrix.insert(0, "B", B_grid)
        return matrix

    def _msd(self, args) -> pd.DataFrame:
        if args.walk_log:
            walks = read_frame(args.walk_log)
            source = f"log {args.walk_log}"
        else:
            flight = FlightTimeDist(gamma=args.gamma)
            with console.status("[bold green]Simulando caminhantes de Lévy..."):
                walks = simulate_levy_walks(flight, args.walkers, make_rng(args.seed), speed=args.speed)
            source = f"{args.walkers} caminhantes sintéticos, γ={args.gamma:g}"

        estimate = msd_of_quotes(walks, min_walkers=args.min_walkers)
        flag = " [yellow](sinalizado)[/yellow]" if estimate.flagged else ""
        console.print(
            Panel(
                f"Fonte: {source}\n"
                f"α = {estimate.alpha:.4f} ± {estimate.stderr:.4f}{flag}\n"
                f"Janela de ajuste: [{estimate.fit_window[0]:.3g}, {estimate.fit_window[1]:.3g}] "
                f"({estimate.n_points} pontos)",
                title="[cyan]Expoente do MSD[/cyan]",
                border_style="cyan",
            )
        )
        return estimate.curve()


def _add_config_flags(parser: argparse.ArgumentParser, default_config: str) -> None:
    parser.add_argument("--config", default=default_config, help="Arquivo de configuração key=value (ou nome em configs/)")
    parser.add_argument("--seed", type=int, help="Semente (sobrepõe arquivo e LEVY_AUCTION_SEED)")
    parser.add_argument("--event-rate", type=float, help="Taxa de eventos (eventos/segundo)")
    parser.add_argument("--gamma", type=float, help="Expoente do tempo de voo")
    parser.add_argument("--n-traders", type=int, help="Número de traders")
    parser.add_argument("--set", action="append", metavar="KEY=VALUE", help="Sobrepõe qualquer chave (repetível)")


def _add_model_flags(parser: argparse.ArgumentParser, gamma: float) -> None:
    parser.add_argument("--u0", type=float, default=1.0, help="Escala da velocidade lorentziana")
    parser.add_argument("--v-max", type=float, default=None, help="Truncamento simétrico da velocidade")
    parser.add_argument("--gamma", type=float, default=gamma, help="Expoente do tempo de voo")
    parser.add_argument("--exponential", action="store_true", help="Tempos de voo exponenciais (referência)")
    parser.add_argument("--rate", type=float, default=1.0, help="Taxa dos tempos de voo exponenciais")


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser with all subcommands."""
    parser = argparse.ArgumentParser(description="Levy Auction - simulador de leilão duplo com busca de Lévy")
    parser.add_argument("--debug", action="store_true", help="Ativar modo debug")
    commands = parser.add_subparsers(dest="command", required=True)

    simulate = commands.add_parser("simulate", help="Executa um experimento")
    _add_config_flags(simulate, "default")
    simulate.add_argument("--output-dir", default="outputs/simulate", help="Diretório de saída")
    simulate.add_argument("--events", action="store_true", help="Grava o log de eventos")
    simulate.add_argument("--walk-log", action="store_true", help="Grava o log de deslocamento das cotações")

    sweep = commands.add_parser("sweep", help="Executa a grade de experimentos")
    _add_config_flags(sweep, "desk_scale")
    preset = sweep.add_mutually_exclusive_group()
    preset.add_argument("--paper-grid", action="store_true", help="Grade completa: 6 taxas x 11 gammas x 2 viés x 30")
    preset.add_argument("--desk-scale", action="store_true", help="Grade reduzida: 4 taxas x 3 gammas x 2 viés x 10")
    sweep.add_argument("--trials", type=int, help="Experimentos por célula")
    sweep.add_argument("--jobs", type=int, default=1, help="Processos paralelos")
    sweep.add_argument("--output-dir", default="outputs/sweep", help="Diretório de saída")
    sweep.add_argument("--report", action="store_true", help="Imprime e grava o relatório estatístico")

    analytics = commands.add_parser("analytics", help="Ferramentas analíticas")
    analytics.add_argument("--output", help="Arquivo CSV de saída (padrão: stdout)")
    tools = analytics.add_subparsers(dest="analytics_command", required=True)

    propagator = tools.add_parser("propagator", help="Propagador G(k,s) em grade")
    _add_model_flags(propagator, gamma=1.5)
    propagator.add_argument("--form", choices=["renewal", "position"], default="position")
    propagator.add_argument("--method", choices=["auto", "quadrature"], default="auto")
    propagator.add_argument("--asymptotic", action="store_true", help="Forma assintótica (k, s pequenos)")
    for name, lo, hi in (("k", 0.0, 1.0), ("s", 0.1, 1.0)):
        propagator.add_argument(f"--{name}-min", type=float, default=lo)
        propagator.add_argument(f"--{name}-max", type=float, default=hi)
        propagator.add_argument(f"--{name}-count", type=int, default=11)
        propagator.add_argument(f"--{name}-scale", choices=["linear", "log"], default="linear")

    scaling = tools.add_parser("scaling", help="Função de escala balística φ(y)")
    _add_model_flags(scaling, gamma=0.5)
    scaling.add_argument("--y-min", type=float, default=-5.0)
    scaling.add_argument("--y-max", type=float, default=5.0)
    scaling.add_argument("--y-count", type=int, default=21)
    scaling.add_argument("--y", type=float, nargs="+", help="Pontos y explícitos (sobrepõe a grade)")

    cauchy = tools.add_parser("cauchy", help="Propagador de Cauchy G(x,t)")
    cauchy.add_argument("--u0", type=float, default=1.0)
    cauchy.add_argument("--x", type=float, nargs="+", default=[0.0])
    cauchy.add_argument("--t", type=float, nargs="+", default=[1.0])

    density = tools.add_parser("density", help="Densidade de partículas de mercado")
    density.add_argument(
        "--scenario",
        choices=["master", "steady", "large-demand", "inflow", "high-reaction", "interauction", "surface"],
        default="master",
    )
    for name, default in (("D", 1.0), ("lambda1", 0.0), ("lambda2", 0.0), ("v", 0.0), ("v1", 0.0),
                          ("phi2", 0.0), ("v-star", 1.0), ("B", 0.2), ("c", 0.0), ("mass", 1.0),
                          ("x0", 0.0), ("sigma", 0.0), ("tau", 0.01), ("omega", 1.0), ("source-rate", 0.0)):
        density.add_argument(f"--{name}", type=float, default=default)
    density.add_argument("--regime", choices=["diffusive", "transaction-drift", "gradient-drift"], default="diffusive")
    density.add_argument("--inflow-regime", choices=["time", "spatial"], default="time")
    density.add_argument("--grid", choices=sorted(SURFACE_GRIDS), default="overview")
    density.add_argument("--x-min", type=float, default=-5.0)
    density.add_argument("--x-max", type=float, default=5.0)
    density.add_argument("--x-count", type=int, default=101)
    density.add_argument("--t", type=float, nargs="+", default=[1.0])

    surface = tools.add_parser("surface", help="Superfície do fator multiplicador (B x τ)")
    surface.add_argument("--grid", choices=sorted(SURFACE_GRIDS), default="overview")
    surface.add_argument("--D", type=float, default=1.0)
    surface.add_argument("--v-star", type=float, default=1.0)
    surface.add_argument("--layout", choices=["matrix", "long"], default="matrix")

    msd = tools.add_parser("msd", help="Expoente α do deslocamento quadrático médio")
    msd.add_argument("--walk-log", help="Log de deslocamento gravado por simulate --walk-log")
    msd.add_argument("--gamma", type=float, default=1.5)
    msd.add_argument("--walkers", type=int, default=10_000)
    msd.add_argument("--speed", type=float, default=1.0)
    msd.add_argument("--seed", type=int, default=0)
    msd.add_argument("--min-walkers", type=int, default=10)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point."""
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.debug)

    cli = AuctionCLI(debug=args.debug)
    if args.command == "simulate":
        return cli.cmd_simulate(args)
    if args.command == "sweep":
        return cli.cmd_sweep(args)
    return cli.cmd_analytics(args)


if __name__ == "__main__":
    sys.exit(main())
