import os
import sys
import argparse
import logging
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from dotenv import load_dotenv

# Add parent directory to path to import config
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))
from config.rules import CLASSIFY_SETTINGS, EXIT_CODES, OUTPUT_SETTINGS, SEARCH_SETTINGS, TOOL_VERSION, get_setting

from casegen import ConstraintViolation, admissible_case, branch_for, defect_branches, degree_bound
from certificate import (
    CertificateFormatError,
    CertificateWriter,
    deduced_certificate,
    load_certificate,
    propagated_certificate,
)
from codim3 import LEMMA_PATTERN_INDICES, brute_force_classify, theorem51_certificate, u_sequence
from parallel_processor import ProgressPrinter, SearchAborted
from recurrence import Coefficients, PreconditionError, segre_sequence
from search import Certificate, Resolution, SearchOptions, run_case

logger = logging.getLogger('defect_verifier')


class UsageError(ValueError):
    """Command-line input that cannot be turned into a run."""


@dataclass
class RunManifest:
    """What a verify run was asked to do and how each case was resolved."""
    m: int
    requested: List[int]
    resolutions: Dict[int, str] = field(default_factory=dict)
    skipped: Dict[int, str] = field(default_factory=dict)
    outputs: Dict[int, str] = field(default_factory=dict)


def parse_n_range(text: str) -> List[int]:
    """Parse '14' or '10..60' into the list of ambient dimensions."""
    try:
        if '..' in text:
            lo_text, hi_text = text.split('..', 1)
            lo, hi = int(lo_text), int(hi_text)
        else:
            lo = hi = int(text)
    except ValueError:
        raise UsageError(f"--N expects an integer or a range a..b, got {text!r}")
    if lo > hi:
        raise UsageError(f"--N range {text!r} is empty")
    return list(range(lo, hi + 1))


def parse_coefficients(text: str) -> Coefficients:
    try:
        values = tuple(int(part) for part in text.split(','))
    except ValueError:
        raise UsageError(f"--coeffs expects comma-separated integers, got {text!r}")
    try:
        return Coefficients(values)
    except PreconditionError as e:
        raise UsageError(str(e))


def add_search_flags(parser):
    parser.add_argument(
        '--huh-filter',
        action='store_true',
        help='Annotate candidates that fail log-concavity (they are never dropped)'
    )
    parser.add_argument(
        '--bound-variant',
        choices=['plain', 'chained'],
        default=SEARCH_SETTINGS['bound_variant'],
        help='plain: c_j <= c1^j; chained: c_j <= c1*c_(j-1) (default: %(default)s)'
    )
    parser.add_argument(
        '--threads', '-t',
        type=int,
        help='Number of worker processes (default: DEFECT_VERIFIER_THREADS or 1)'
    )
    parser.add_argument(
        '--evidence',
        action='store_true',
        help='Store the s-sequence and delta invariants of every candidate'
    )


def parse_args(argv=None):
    parser = argparse.ArgumentParser(
        prog='defect-verifier',
        description='Exhaustive, certificate-producing verifier for the duality defect conjecture in codimension m >= 3.',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog='''
Examples:
  # Codimension 3, even N searched, odd successors propagated
  python3 src/main.py verify --codim 3 --N 10..60 --even-only --propagate

  # Codimension 3, odd N by deduction (no search)
  python3 src/main.py verify --codim 3 --N 11..201 --theorem51

  # Degree bounds for each defect branch
  python3 src/main.py bound --codim 5 --N 18

  # Inspect a recurrence
  python3 src/main.py seq --coeffs 3,9,27 --len 11

  # Classify double zeros of order-three sequences
  python3 src/main.py classify --cmax 12 --horizon 60
'''
    )
    parser.add_argument(
        '--env-file',
        type=str,
        help='Path to a .env.local file with optional overrides (default: ./.env.local)'
    )
    parser.add_argument(
        '--verbose', '-v',
        action='store_true',
        help='Log debug details to stderr'
    )
    parser.add_argument(
        '--no-color',
        action='store_true',
        help='Disable colored output'
    )
    sub = parser.add_subparsers(dest='command', required=True)

    verify = sub.add_parser('verify', help='Run the search for a range of ambient dimensions')
    verify.add_argument('--codim', '-m', type=int, required=True, help='Codimension m (>= 3)')
    verify.add_argument('--N', required=True, help='Ambient dimension N or a range a..b')
    verify.add_argument('--even-only', action='store_true', help='Only consider even N in the range')
    verify.add_argument(
        '--propagate',
        action='store_true',
        help='Codimension 3: resolve odd N from a verified N-1'
    )
    verify.add_argument(
        '--propagate-general',
        action='store_true',
        help='Any codimension: verified (N, m) resolves (N+1, m) when N+1-m is even'
    )
    verify.add_argument(
        '--theorem51',
        action='store_true',
        help='Codimension 3: resolve odd N by deduction; even N are skipped'
    )
    verify.add_argument(
        '--prior',
        action='append',
        default=[],
        help='Existing certificate usable as a propagation source (repeatable)'
    )
    verify.add_argument('--out', '-o', help='Output directory (default: DEFECT_VERIFIER_OUT or ./certificates)')
    verify.add_argument(
        '--format',
        choices=['json', 'csv'],
        default=OUTPUT_SETTINGS['format'],
        help='json: one certificate per case; csv: additionally write summary.csv'
    )
    add_search_flags(verify)

    bound = sub.add_parser('bound', help='Print the degree bound for each defect branch')
    bound.add_argument('--codim', '-m', type=int, required=True)
    bound.add_argument('--N', type=int, required=True)
    bound.add_argument('--r', type=int, help='Only this defect')

    seq = sub.add_parser('seq', help='Print the Segre recurrence for given Chern numbers')
    seq.add_argument('--coeffs', required=True, help='Comma-separated c_1,...,c_m')
    seq.add_argument('--len', dest='length', type=int, required=True, help='Last index L')

    classify = sub.add_parser('classify', help='Classify double zeros of order-three sequences')
    classify.add_argument('--cmax', type=int, required=True, help='Largest coefficient value')
    classify.add_argument('--horizon', type=int, default=CLASSIFY_SETTINGS['horizon'],
                          help='Last index scanned (default: %(default)s)')
    classify.add_argument('--threads', '-t', type=int, help='Number of worker processes')

    return parser.parse_args(argv)


def configure_logging(verbose: bool):
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        stream=sys.stderr,
        format='%(asctime)s %(levelname)s %(name)s: %(message)s',
    )


def resolve_threads(value: Optional[int]) -> int:
    threads = value if value is not None else get_setting('threads')
    if threads < 1:
        raise UsageError(f"--threads must be at least 1, got {threads}")
    return threads


def plan_verify(args) -> Tuple[RunManifest, bool]:
    """Work out which N are handled and whether propagation applies."""
    m = args.codim
    Ns = parse_n_range(args.N)
    skipped = {}

    if args.even_only:
        Ns = [N for N in Ns if N % 2 == 0]

    if args.theorem51:
        if m != 3:
            raise UsageError("--theorem51 applies to codimension 3 only")
        for N in Ns:
            if N % 2 == 0:
                skipped[N] = 'the deduction covers odd N only; search even N in a separate run'
        Ns = [N for N in Ns if N % 2 == 1]

    propagate = args.propagate_general or (args.propagate and m == 3)
    if args.propagate and m != 3 and not args.propagate_general:
        logger.warning("--propagate only applies to codimension 3; use --propagate-general for m=%d", m)

    if propagate and args.even_only:
        successors = [N + 1 for N in Ns if (N + 1 - m) % 2 == 0]
        Ns = sorted(set(Ns) | set(successors))

    if not Ns:
        raise UsageError(f"no ambient dimensions left to handle in {args.N!r}")

    for N in Ns:
        if args.theorem51:
            theorem51_certificate(N)
        else:
            admissible_case(N, m)

    return RunManifest(m=m, requested=Ns, skipped=skipped), propagate


def cmd_verify(args, printer: ProgressPrinter) -> int:
    """Search, propagate or deduce every requested case and write certificates."""
    manifest, propagate = plan_verify(args)
    m = manifest.m
    threads = resolve_threads(args.threads)
    options = SearchOptions(
        bound_variant=args.bound_variant,
        huh_filter=args.huh_filter,
        worker_count=threads,
        evidence=args.evidence,
    )
    out_dir = os.path.abspath(args.out or get_setting('out_dir'))
    writer = CertificateWriter(out_dir)

    # Verified cases usable as propagation sources: N -> (certificate, reference)
    verified: Dict[int, Tuple[Certificate, str]] = {}
    for path in args.prior:
        try:
            prior = load_certificate(path)
        except OSError as e:
            raise UsageError(f"cannot read prior certificate {path}: {e}")
        if prior.verdict and prior.case.m == m:
            verified[prior.case.N] = (prior, os.path.abspath(path))
        else:
            logger.warning("Prior certificate %s is not a True certificate for m=%d; ignored", path, m)

    print("Duality Defect Verifier")
    print("=" * 60)
    print(f"Codimension:     {m}")
    print(f"Cases:           {len(manifest.requested)} (N={manifest.requested[0]}..{manifest.requested[-1]})")
    print(f"Bounds:          {options.bound_variant.value}")
    print(f"Huh filter:      {'on' if options.huh_filter else 'off'}")
    print(f"Workers:         {threads}")
    print(f"Output:          {out_dir}")
    print("=" * 60)
    for N, reason in sorted(manifest.skipped.items()):
        printer.print_skip(N, reason)

    certs: List[Certificate] = []
    start_time = time.time()
    try:
        for idx, N in enumerate(manifest.requested, 1):
            source = verified.get(N - 1)
            can_propagate = (
                propagate
                and (N - m) % 2 == 0
                and source is not None
                and source[0].verdict
                and (m != 3 or (N - 1) % 2 == 0)
            )

            if args.theorem51:
                printer.print_case_header(N, m, idx, len(manifest.requested), 'deduced')
                cert = deduced_certificate(theorem51_certificate(N), options)
            elif can_propagate:
                printer.print_case_header(N, m, idx, len(manifest.requested), f'propagated from N={N - 1}')
                cert = propagated_certificate(source[0], N, source[1])
            else:
                printer.print_case_header(N, m, idx, len(manifest.requested), 'search')
                cert = run_case(admissible_case(N, m), options)
                for branch in cert.branches:
                    printer.print_branch(
                        branch.branch.r, branch.branch.c1,
                        branch.tuples_enumerated, branch.tuples_pruned_early, len(branch.candidates),
                    )

            path = writer.write_certificate(cert)
            manifest.resolutions[N] = (
                f"propagated-from({N - 1})" if cert.resolution is Resolution.PROPAGATED else cert.resolution.value
            )
            manifest.outputs[N] = path
            printer.print_verdict(cert.verdict, f"{cert.wall_time:.2f}s, {os.path.basename(path)}")
            if cert.verdict:
                verified[N] = (cert, path)
            certs.append(cert)

        if args.format == 'csv':
            writer.write_summary(certs)
    except (SearchAborted, OSError, KeyboardInterrupt) as e:
        removed = writer.remove_written()
        print(f"\nError: run aborted: {e}")
        print(f"Removed {removed} partial output file(s); no verdict was reached.")
        return EXIT_CODES['aborted']
    except Exception:
        removed = writer.remove_written()
        logger.error("Run failed; removed %d partial output file(s)", removed)
        raise

    for N in manifest.requested:
        logger.debug("N=%d: %s -> %s", N, manifest.resolutions[N], manifest.outputs[N])
    printer.print_summary([c.verdict for c in certs], time.time() - start_time)
    if all(c.verdict for c in certs):
        return EXIT_CODES['ok']
    print("Candidates were found; the affected cases are inconclusive.")
    return EXIT_CODES['candidates']


def cmd_bound(args, printer: ProgressPrinter) -> int:
    """Print the degree bound of every defect branch (or the one requested)."""
    case = admissible_case(args.N, args.codim)
    branches = [branch_for(case, args.r)] if args.r is not None else defect_branches(case)

    print(f"Degree bounds for N={case.N}, m={case.m} (n={case.n})")
    print("-" * 40)
    for branch in branches:
        print(f"r={branch.r}: {degree_bound(case.N, case.m, branch.r)}  (c1={branch.c1})")
    return EXIT_CODES['ok']


def cmd_seq(args, printer: ProgressPrinter) -> int:
    """Print s_0..s_L and, for order three, the aligned u-sequence."""
    coeffs = parse_coefficients(args.coeffs)
    if args.length < 0:
        raise UsageError(f"--len must be nonnegative, got {args.length}")
    terms = segre_sequence(coeffs, args.length).terms

    print(f"c = ({', '.join(str(v) for v in coeffs.c)})")
    print(f"s = {', '.join(str(v) for v in terms)}")

    if coeffs.order == 3:
        if all(v > 0 for v in coeffs.c):
            u = u_sequence(*coeffs.c, args.length + 2).terms
            print(f"u = {', '.join(str(v) for v in u)}")
            print()
            print(f"{'j':>4}  {'s_j':>24}  {'u_(j+2)':>24}")
            for j, s in enumerate(terms):
                print(f"{j:>4}  {s:>24}  {u[j + 2]:>24}")
        else:
            print("u-sequence not shown: it needs positive c1, c2, c3")
    return EXIT_CODES['ok']


def cmd_classify(args, printer: ProgressPrinter) -> int:
    """Classify double-zero indices over [1, cmax]^3."""
    if args.cmax < 0:
        raise UsageError(f"--cmax must be nonnegative, got {args.cmax}")
    threads = resolve_threads(args.threads)
    result = brute_force_classify(args.cmax, args.horizon, worker_count=threads)

    print(f"Double zeros for c1, c2, c3 in [1, {args.cmax}], horizon {args.horizon}")
    print("=" * 60)
    if not result.patterns:
        print("No double-zero sequences found.")
        return EXIT_CODES['ok']

    for triple, m in sorted(result.patterns.items()):
        print(f"  {triple} -> m={m}")
    print("-" * 60)
    for m, count in sorted(result.histogram().items()):
        print(f"m={m}: {count}")

    unexpected = sorted(set(result.patterns.values()) - set(LEMMA_PATTERN_INDICES))
    anomalies = result.anomalies
    if anomalies or unexpected:
        print(f"\nERROR: {len(anomalies)} anomaly(ies) found; this indicates an implementation bug")
        for report in anomalies:
            print(f"  ({report.c1}, {report.c2}, {report.c3}) m={report.m}: {report.anomaly}")
        return EXIT_CODES['anomaly']

    print(f"\nAll indices lie in {set(LEMMA_PATTERN_INDICES)}; no anomalies.")
    return EXIT_CODES['ok']


COMMANDS = {
    'verify': cmd_verify,
    'bound': cmd_bound,
    'seq': cmd_seq,
    'classify': cmd_classify,
}


def main(argv=None):
    args = parse_args(argv)
    configure_logging(args.verbose)

    # Load optional overrides from .env.local
    env_path = args.env_file or os.path.join(os.getcwd(), '.env.local')
    if args.env_file and not os.path.exists(env_path):
        print(f"Error: env file does not exist: {env_path}")
        return EXIT_CODES['usage']
    load_dotenv(env_path)
    logger.debug("defect-verifier %s, env file %s", TOOL_VERSION, env_path)

    printer = ProgressPrinter(use_color=not args.no_color)
    try:
        return COMMANDS[args.command](args, printer)
    except ConstraintViolation as e:
        print(f"Error: constraint violated ({e.inequality}): {e}")
        return EXIT_CODES['usage']
    except (UsageError, PreconditionError, CertificateFormatError, ValueError) as e:
        print(f"Error: {e}")
        return EXIT_CODES['usage']
    except SearchAborted as e:
        print(f"Error: run aborted: {e}")
        return EXIT_CODES['aborted']


if __name__ == "__main__":
    sys.exit(main())
