# src/qcsat/cli.py
"""
Línea de comandos de qcsat.

    qcsat validate  ARCHIVO
    qcsat decompose ARCHIVO [--dump-tree RUTA] [--dump-carving RUTA]
    qcsat simulate  ARCHIVO [--assign Y]
    qcsat satisfy   ARCHIVO (--delta D | --epsilon E)
    qcsat oracle    ARCHIVO
    qcsat gen       random|3sat [...]

Códigos de salida: 0 correcto, 1 validación, 2 recursos, 3 invariante interno.
"""

import argparse
import logging
import sys
from typing import Optional, Sequence

from pydantic import ValidationError

from qcsat import __version__
from qcsat.core.config import settings
from qcsat.core.errors import InvalidInputError, QcsatError
from qcsat.schemas.reports import RunConfig
from qcsat.services import reports
from qcsat.services.circuit import format_circuit, initialize, parse_circuit
from qcsat.services.exactsim import acceptance_probability
from qcsat.services.formats import format_carving, format_contraction_tree
from qcsat.services.generators import gen_3sat_verifier, gen_random_circuit, parse_dimacs, random_3cnf
from qcsat.services.oracle import brute_force_max
from qcsat.services.satsolve import solve_classical_assignment

logger = logging.getLogger("qcsat")

_LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]


# ============================================================
# ARGUMENTOS
# ============================================================

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="Semilla de toda la aleatoriedad")
    common.add_argument("--threads", type=int, default=settings.threads, help="Hilos de trabajo")
    common.add_argument("--max-set-size", dest="max_set_size", type=int, default=settings.max_set_size,
                        help="Tamaño máximo de cada conjunto de tensores")
    common.add_argument("--oracle-cap", dest="oracle_cap", type=int, default=settings.oracle_wire_cap,
                        help="Cables activos del oráculo (en qubits)")
    common.add_argument("--format", dest="output_format", choices=["human", "records"], default="human",
                        help="Formato del reporte")
    common.add_argument("--out", help="Escribe la salida en RUTA en lugar de stdout")
    common.add_argument("--log-level", dest="log_level", choices=_LOG_LEVELS, default=settings.log_level.upper(),
                        help="Nivel de log (stderr)")
    common.add_argument("--timings", action="store_true", help="Incluye el tiempo de reloj en el reporte")

    parser = argparse.ArgumentParser(
        prog="qcsat",
        description="Asignaciones clásicas para circuitos cuánticos de treewidth pequeño",
    )
    parser.add_argument("--version", action="version", version=f"qcsat {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="Valida un circuito, una red o un grafo")
    p.add_argument("path")

    p = sub.add_parser("decompose", parents=[common], help="Árbol de contracción y sus medidas")
    p.add_argument("path")
    p.add_argument("--dump-tree", dest="dump_tree", help="Guarda el árbol de contracción")
    p.add_argument("--dump-carving", dest="dump_carving", help="Guarda el tallado contractivo")

    p = sub.add_parser("simulate", parents=[common], help="Probabilidad de aceptación exacta")
    p.add_argument("path")
    p.add_argument("--assign", help="Asignación y de las entradas '*'")

    p = sub.add_parser("satisfy", parents=[common], help="Busca una asignación clásica casi óptima")
    p.add_argument("path")
    precision = p.add_mutually_exclusive_group(required=True)
    precision.add_argument("--delta", type=float, help="Precisión objetivo δ")
    precision.add_argument("--epsilon", type=float, help="ε fijo de la red")

    p = sub.add_parser("oracle", parents=[common], help="Máximo por fuerza bruta (matriz densidad)")
    p.add_argument("path")
    p.add_argument("--assignment-cap", dest="assignment_cap", type=int, default=settings.oracle_assignment_cap,
                   help="Máximo de asignaciones enumeradas")

    p = sub.add_parser("gen", parents=[common], help="Genera circuitos de prueba")
    p.add_argument("kind", choices=["random", "3sat"])
    p.add_argument("--inputs", type=int, default=2, help="random: entradas")
    p.add_argument("--gates", type=int, default=2, help="random: compuertas")
    p.add_argument("--structure", choices=["path", "tree", "ladder"], default="path", help="random: cableado")
    p.add_argument("--d", type=int, default=2, help="random: dimensión de los qudits")
    p.add_argument("--uninitialized", type=int, default=0, help="random: entradas '*'")
    p.add_argument("--formula", help="3sat: archivo DIMACS")
    p.add_argument("--vars", type=int, default=3, help="3sat: variables de la fórmula aleatoria")
    p.add_argument("--clauses", type=int, default=3, help="3sat: cláusulas de la fórmula aleatoria")
    p.add_argument("--amplify", type=int, default=0, help="3sat: repeticiones del amplificador")
    p.add_argument("--threshold", type=int, help="3sat: umbral de COMP (por defecto ⌈q/2⌉)")
    p.add_argument("--report", help="gen: guarda el reporte de generación en RUTA")
    return parser


def _run_config(args: argparse.Namespace) -> RunConfig:
    try:
        return RunConfig(
            command=args.command,
            path=getattr(args, "path", None),
            delta=getattr(args, "delta", None),
            epsilon=getattr(args, "epsilon", None),
            seed=args.seed,
            threads=args.threads,
            max_set_size=args.max_set_size,
            oracle_cap=args.oracle_cap,
            output_format=args.output_format,
            out=args.out,
            timings=args.timings,
        )
    except ValidationError as e:
        first = e.errors()[0]
        raise InvalidInputError(f"Opciones inválidas: {first['msg']}")


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(text)


# ============================================================
# SUBCOMANDOS
# ============================================================

def cmd_validate(cfg: RunConfig, args) -> int:
    summary = reports.validate_source(reports.read_text(cfg.path))
    _emit(reports.render("validate", summary, cfg.output_format), cfg.out)
    return 0 if summary.valid else InvalidInputError.exit_code


def cmd_decompose(cfg: RunConfig, args) -> int:
    report, good = reports.decompose_text(reports.read_text(cfg.path), seed=cfg.seed)
    if args.dump_tree:
        _write(args.dump_tree, format_contraction_tree(good.tree))
    if args.dump_carving:
        _write(args.dump_carving, format_carving(good.carving))
    _emit(reports.render("decompose", report, cfg.output_format), cfg.out)
    return 0


def cmd_simulate(cfg: RunConfig, args) -> int:
    circuit = parse_circuit(reports.read_text(cfg.path))
    if args.assign is not None:
        circuit = initialize(circuit, args.assign)
    result = acceptance_probability(circuit, seed=cfg.seed)
    _emit(reports.render("simulate", result, cfg.output_format), cfg.out)
    return 0


def cmd_satisfy(cfg: RunConfig, args) -> int:
    circuit = parse_circuit(reports.read_text(cfg.path))
    result = solve_classical_assignment(
        circuit,
        delta=cfg.delta,
        epsilon=cfg.epsilon,
        seed=cfg.seed,
        threads=cfg.threads,
        max_set_size=cfg.max_set_size,
        timings=cfg.timings,
    )
    _emit(reports.render("satisfy", result, cfg.output_format), cfg.out)
    return 0


def cmd_oracle(cfg: RunConfig, args) -> int:
    circuit = parse_circuit(reports.read_text(cfg.path))
    result = brute_force_max(
        circuit,
        assignment_cap=args.assignment_cap,
        wire_cap=cfg.oracle_cap,
        threads=cfg.threads,
    )
    _emit(reports.render("oracle", result, cfg.output_format), cfg.out)
    return 0


def cmd_gen(cfg: RunConfig, args) -> int:
    if args.kind == "random":
        circuit = gen_random_circuit(
            args.inputs, args.gates, structure=args.structure, d=args.d,
            seed=cfg.seed, n_uninitialized=args.uninitialized,
        )
    else:
        if args.formula:
            formula = parse_dimacs(reports.read_text(args.formula))
        else:
            formula = random_3cnf(args.vars, args.clauses, seed=cfg.seed)
        circuit = gen_3sat_verifier(formula, amplify=args.amplify, threshold=args.threshold)
    _emit(format_circuit(circuit), cfg.out)
    if args.report:
        _write(args.report, reports.render("gen", reports.generation_report(args.kind, circuit), cfg.output_format))
    return 0


COMMANDS = {
    "validate": cmd_validate,
    "decompose": cmd_decompose,
    "simulate": cmd_simulate,
    "satisfy": cmd_satisfy,
    "oracle": cmd_oracle,
    "gen": cmd_gen,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse sale con 2 ante opciones inválidas; aquí es un error de validación
        return 0 if e.code == 0 else InvalidInputError.exit_code

    logging.basicConfig(
        level=args.log_level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
        force=True,
    )
    try:
        cfg = _run_config(args)
        return COMMANDS[cfg.command](cfg, args)
    except QcsatError as e:
        print(f"error: {e.message}", file=sys.stderr)
        return e.exit_code
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return InvalidInputError.exit_code
    except Exception as e:
        logger.error(f"Error inesperado: {type(e).__name__}: {e}", exc_info=True)
        return 3


if __name__ == "__main__":
    sys.exit(main())
