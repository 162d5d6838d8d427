"""
TOBL Correlation Toolkit - Main CLI Application
Command-line interface for membership checks, Bell maximization, wirings
and the reference reproduction
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import colorlog

import formats
import reference_data
from bell import chsh, evaluate, gyni
from cache import SolveCache
from config import LOG_FILE, LOG_LEVEL, TABLE_FORMATS
from core import is_nonsignaling, postselect, uniform
from errors import ToblError
from exporter import ResultExporter
from membership import (is_local, is_tobl, maximize_bell, postselection_local_model,
                        reconstruct_local)
from models import CorrelationSet, LocalModel, ToblDecomposition
from reproduction import reproduce_reference_results
from wiring import check_wiring_locality, simulate

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NOT_MEMBER = 1
EXIT_ERROR = 2

_SETS = {'local': CorrelationSet.LOCAL, 'tobl': CorrelationSet.TOBL, 'ns': CorrelationSet.NO_SIGNALING}


def setup_logging(level: str = LOG_LEVEL, log_file: str = LOG_FILE) -> None:
    """Colored records to stderr, plain ones to LOG_FILE when set; stdout stays machine-readable"""
    root = logging.getLogger()
    for handler in [h for h in root.handlers if getattr(h, 'tobl_cli', False)]:
        root.removeHandler(handler)
        handler.close()

    handler = colorlog.StreamHandler(sys.stderr)
    handler.setFormatter(colorlog.ColoredFormatter(
        '%(log_color)s%(asctime)s - %(name)s - %(levelname)s - %(message)s'))
    handlers: List[logging.Handler] = [handler]
    if log_file:
        file_handler = logging.FileHandler(log_file)
        file_handler.setFormatter(logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s'))
        handlers.append(file_handler)
    for h in handlers:
        h.tobl_cli = True
        root.addHandler(h)
    root.setLevel(getattr(logging, level.upper(), logging.INFO))


def _emit(payload) -> None:
    print(formats.dump(payload))


class ToolkitCLI:
    """Command-line interface for the TOBL toolkit"""

    def __init__(self, use_cache: bool = True, tables: Optional[str] = None,
                 output_dir: Optional[str] = None):
        self.use_cache = use_cache
        self.tables = tables
        self.output_dir = output_dir
        self._exporter: Optional[ResultExporter] = None

    @property
    def exporter(self) -> ResultExporter:
        if self._exporter is None:
            self._exporter = ResultExporter(self.output_dir)
        return self._exporter

    def _export_witness(self, witness, name: str) -> None:
        if not self.tables or witness is None:
            return
        if isinstance(witness, ToblDecomposition):
            paths = self.exporter.export_decomposition(witness, name, self.tables)
        elif isinstance(witness, LocalModel):
            paths = self.exporter.export_local_model(witness, name, self.tables)
        else:
            return
        print(f"Tables written: {', '.join(str(p) for p in paths)}", file=sys.stderr)

    def check(self, kind: str, behavior_file: str) -> int:
        behavior = formats.load(behavior_file, formats.behavior_from_json)

        if kind == 'ns':
            violations = is_nonsignaling(behavior)
            if violations:
                _emit({'nonsignaling': False, 'violations': formats.violations_to_json(violations)})
                print(f"Signaling: {len(violations)} violations", file=sys.stderr)
                return EXIT_NOT_MEMBER
            _emit({'nonsignaling': True})
            print("No-signaling", file=sys.stderr)
            return EXIT_OK

        if kind == 'local':
            result = is_local(behavior)
            if isinstance(result, LocalModel):
                _emit(formats.local_model_to_json(result))
                print(f"Local: model with {len(result.terms)} terms", file=sys.stderr)
                self._export_witness(result, Path(behavior_file).stem + '_local')
                return EXIT_OK
            _emit(formats.separating_to_json(result))
            print(f"Not local: value {result.value} > bound {result.bound}", file=sys.stderr)
            return EXIT_NOT_MEMBER

        result = is_tobl(behavior)
        if isinstance(result, ToblDecomposition):
            _emit(formats.decomposition_to_json(result))
            print("TOBL: decomposition found for every bipartition", file=sys.stderr)
            self._export_witness(result, Path(behavior_file).stem + '_tobl')
            return EXIT_OK
        bipartition, separating = result
        _emit({'bipartition': bipartition.label, 'separating': formats.separating_to_json(separating)})
        print(f"Not TOBL: bipartition {bipartition.label} fails, value {separating.value} "
              f"> bound {separating.bound}", file=sys.stderr)
        return EXIT_NOT_MEMBER

    def eval(self, functional_file: str, behavior_file: str) -> int:
        functional = formats.load(functional_file, formats.functional_from_json)
        behavior = formats.load(behavior_file, formats.behavior_from_json)
        print(formats.format_rational(evaluate(functional, behavior)))
        return EXIT_OK

    def maximize(self, functional_file: str, set_name: str, symmetric: bool = False,
                 output: Optional[str] = None, witness_output: Optional[str] = None) -> int:
        functional = formats.load(functional_file, formats.functional_from_json)
        correlation_set = _SETS[set_name]
        cache = SolveCache() if self.use_cache else None

        optimum = cache.get(functional, correlation_set, symmetric) if cache else None
        if optimum is None:
            optimum = maximize_bell(functional, correlation_set, symmetric=symmetric)
            if cache:
                cache.set(functional, optimum)

        print(formats.format_rational(optimum.value))
        print(f"Maximum over {correlation_set.value}: {optimum.value}", file=sys.stderr)
        if output:
            formats.write_json(output, formats.behavior_to_json(optimum.optimizer))
        if witness_output and optimum.witness is not None:
            payload = (formats.decomposition_to_json(optimum.witness)
                       if isinstance(optimum.witness, ToblDecomposition)
                       else formats.local_model_to_json(optimum.witness))
            formats.write_json(witness_output, payload)
        self._export_witness(optimum.witness, Path(functional_file).stem + f'_{set_name}_optimum')
        return EXIT_OK

    def wire(self, protocol_file: str, behavior_files: Sequence[str],
             decomposition_files: Optional[Sequence[str]] = None, output: Optional[str] = None) -> int:
        protocol = formats.load(protocol_file, formats.protocol_from_json)
        boxes = [formats.load(path, formats.behavior_from_json) for path in behavior_files]

        if not decomposition_files:
            p_fin = simulate(protocol, boxes)
            if output:
                formats.write_json(output, formats.behavior_to_json(p_fin))
            _emit(formats.behavior_to_json(p_fin))
            return EXIT_OK

        decompositions = [formats.load(path, formats.decomposition_from_json)
                          for path in decomposition_files]
        report = check_wiring_locality(protocol, boxes, decompositions)
        if output:
            formats.write_json(output, formats.behavior_to_json(report.p_fin))
        _emit(formats.report_to_json(report))
        print(f"Wiring locality: {'PASS' if report.passed else 'FAIL'}", file=sys.stderr)
        return EXIT_OK if report.passed else EXIT_NOT_MEMBER

    def postselect(self, behavior_file: str, party: int, sel_input: int, sel_outcome: int,
                   decomposition_file: Optional[str] = None, output: Optional[str] = None) -> int:
        """Party is 1-based on the command line"""
        behavior = formats.load(behavior_file, formats.behavior_from_json)
        result = postselect(behavior, party - 1, sel_input, sel_outcome)
        if output:
            formats.write_json(output, formats.behavior_to_json(result))

        if not decomposition_file:
            _emit(formats.behavior_to_json(result))
            return EXIT_OK

        decomposition = formats.load(decomposition_file, formats.decomposition_from_json)
        model = postselection_local_model(behavior, decomposition, party - 1, sel_input, sel_outcome)
        matches = reconstruct_local(model) == result
        _emit({'behavior': formats.behavior_to_json(result),
               'model': formats.local_model_to_json(model),
               'reconstruction_equal': matches})
        print(f"Postselected local model: {len(model.terms)} terms, "
              f"reconstruction {'matches' if matches else 'differs'}", file=sys.stderr)
        return EXIT_OK if matches else EXIT_NOT_MEMBER

    def reproduce(self, symmetric: bool = False) -> int:
        results = reproduce_reference_results(symmetric=symmetric)
        for result in results:
            print(f"({result.key}) {'PASS' if result.passed else 'FAIL'}  "
                  f"{result.description}  [{result.detail}]")
        return EXIT_OK if all(r.passed for r in results) else EXIT_NOT_MEMBER

    def export_data(self, directory: str, table_format: str = 'xlsx') -> int:
        """Reference data as input files for the other subcommands"""
        exporter = ResultExporter(directory)
        behavior = reference_data.gyni_box()
        decomposition = reference_data.full_decomposition()
        written = [
            exporter.export_json('gyni_box', formats.behavior_to_json(behavior)),
            exporter.export_json('uniform', formats.behavior_to_json(uniform(behavior.scenario))),
            exporter.export_json('gyni', formats.functional_to_json(gyni())),
            exporter.export_json('chsh', formats.functional_to_json(chsh())),
            exporter.export_json('decomposition', formats.decomposition_to_json(decomposition)),
            exporter.export_json('three_box', formats.protocol_to_json(reference_data.three_box_protocol())),
            exporter.export_json('identity', formats.protocol_to_json(reference_data.identity_protocol())),
        ]
        written += exporter.export_behavior(behavior, 'gyni_box_grid', table_format)
        written += exporter.export_decomposition(decomposition, 'decomposition_tables', table_format)
        _emit([str(p) for p in written])
        print(f"Exported {len(written)} files to {directory}", file=sys.stderr)
        return EXIT_OK

    def show_cache_stats(self) -> int:
        stats = SolveCache().get_stats()
        _emit(stats)
        print(f"Cache: {'Enabled' if stats['enabled'] else 'Disabled'}", file=sys.stderr)
        return EXIT_OK

    def clear_cache(self) -> int:
        SolveCache().clear_expired()
        print("Expired cache entries removed", file=sys.stderr)
        return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='tobl', description='Exact TOBL, local and no-signaling correlation toolkit')
    parser.add_argument('-v', '--verbose', action='store_true', help='Debug logging')

    subparsers = parser.add_subparsers(dest='command', help='Commands')

    check_parser = subparsers.add_parser('check', help='Membership test for a behavior')
    check_parser.add_argument('kind', choices=['ns', 'local', 'tobl'])
    check_parser.add_argument('behavior', help='Behavior JSON file')
    check_parser.add_argument('--tables', choices=TABLE_FORMATS, help='Also export the witness as tables')

    eval_parser = subparsers.add_parser('eval', help='Evaluate a Bell functional on a behavior')
    eval_parser.add_argument('functional', help='Functional JSON file')
    eval_parser.add_argument('behavior', help='Behavior JSON file')

    max_parser = subparsers.add_parser('maximize', help='Maximize a Bell functional over a set')
    max_parser.add_argument('functional', help='Functional JSON file')
    max_parser.add_argument('--set', dest='set_name', choices=list(_SETS), required=True)
    max_parser.add_argument('--symmetric', action='store_true',
                            help='Restrict to behaviors sharing the functional\'s party symmetries')
    max_parser.add_argument('--no-cache', action='store_true', help='Ignore the solve cache')
    max_parser.add_argument('--output', help='Write the optimizing behavior here')
    max_parser.add_argument('--witness', help='Write the model or decomposition here')
    max_parser.add_argument('--tables', choices=TABLE_FORMATS, help='Also export the witness as tables')

    wire_parser = subparsers.add_parser('wire', help='Wire tripartite boxes across A|B')
    wire_parser.add_argument('protocol', help='Protocol JSON file')
    wire_parser.add_argument('boxes', nargs='+', help='One behavior file per box')
    wire_parser.add_argument('--decompositions', nargs='+', help='One decomposition file per box')
    wire_parser.add_argument('--output', help='Write the final bipartite behavior here')

    post_parser = subparsers.add_parser('postselect', help='Condition on one party\'s outcome')
    post_parser.add_argument('behavior', help='Behavior JSON file')
    post_parser.add_argument('--party', type=int, required=True, help='Party number, from 1')
    post_parser.add_argument('--input', type=int, required=True)
    post_parser.add_argument('--outcome', type=int, required=True)
    post_parser.add_argument('--decomposition', help='Decomposition file; builds the local model')
    post_parser.add_argument('--output', help='Write the postselected behavior here')

    verify_parser = subparsers.add_parser('verify-paper', help='Recompute the reference results')
    verify_parser.add_argument('--symmetric', action='store_true', help='Use the symmetry-reduced LP')

    export_parser = subparsers.add_parser('export-data', help='Write the reference data files')
    export_parser.add_argument('directory')
    export_parser.add_argument('--format', choices=TABLE_FORMATS, default='xlsx', help='Table format')

    cache_parser = subparsers.add_parser('cache', help='Cache operations')
    cache_parser.add_argument('action', choices=['stats', 'clear'])

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_ERROR if e.code else EXIT_OK

    setup_logging('DEBUG' if args.verbose else LOG_LEVEL)

    if not args.command:
        parser.print_help(sys.stderr)
        return EXIT_ERROR

    cli = ToolkitCLI(use_cache=not getattr(args, 'no_cache', False),
                     tables=getattr(args, 'tables', None))

    try:
        if args.command == 'check':
            return cli.check(args.kind, args.behavior)
        elif args.command == 'eval':
            return cli.eval(args.functional, args.behavior)
        elif args.command == 'maximize':
            return cli.maximize(args.functional, args.set_name, args.symmetric,
                                args.output, args.witness)
        elif args.command == 'wire':
            return cli.wire(args.protocol, args.boxes, args.decompositions, args.output)
        elif args.command == 'postselect':
            return cli.postselect(args.behavior, args.party, args.input, args.outcome,
                                  args.decomposition, args.output)
        elif args.command == 'verify-paper':
            return cli.reproduce(args.symmetric)
        elif args.command == 'export-data':
            return cli.export_data(args.directory, args.format)
        elif args.command == 'cache':
            return cli.show_cache_stats() if args.action == 'stats' else cli.clear_cache()

    except KeyboardInterrupt:
        logger.warning("Operation cancelled by user")
        return EXIT_ERROR

    except ToblError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_ERROR

    except Exception as e:
        logger.error(f"Fatal error: {e}", exc_info=True)
        return EXIT_ERROR

    return EXIT_ERROR


if __name__ == '__main__':
    sys.exit(main())
