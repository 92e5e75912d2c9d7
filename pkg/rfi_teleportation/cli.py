"""
DESCRIPTION:
    Command-line front end: analyze, construct, verify, simulate, demo and
    subgroups. Standard output carries a human summary; the JSON files written
    to --out carry the machine-readable results.

EXIT CODES:
    0 success, 2 invalid input, 3 certification or verification failure,
    4 UNKNOWN verdict under --require-answer.
"""

import argparse
import json
import logging
import os
import sys

from rfi_teleportation.config import (DEFAULT_OUTPUT_DIR, DEFAULT_SEED, DEFAULT_TOLERANCE, DEFAULT_TRIALS, DEMO_NAMES,
                                      MAX_DIMENSION_GUARANTEED, PERFECT_SLACK, TOOL_VERSION)
from rfi_teleportation.errors import (AmbiguousMatchError, CertificationError, ConstructionFailedError, InfeasibleError,
                                      RFIError, ValidationError)
from rfi_teleportation.linalg import as_tolerance
from rfi_teleportation.reps import (basic_permutation_characters, change_basis, decompose_into_basics, end_character,
                                    find_equivariant_onb, is_permutation_basis, permutation_representation)
from rfi_teleportation.sim import ProtocolSpec, sweep
from rfi_teleportation.ueb import (builtin_z2_example, conjugate_ueb, construct_gueb_dim_le4,
                                   construct_gueb_from_hadamard, verify_equivariance, verify_ueb)
from rfi_teleportation.utils.data_parser import ArtifactParser, class_function_to_json, saveJson

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_CERTIFICATION = 3
EXIT_UNKNOWN = 4

IMPOSSIBLE, CONSTRUCTED, UNKNOWN = 'IMPOSSIBLE', 'CONSTRUCTED', 'UNKNOWN'


def _parser_for(args):
    return ArtifactParser(tol=as_tolerance(args.tol))


def _load_rep(args, parser):
    rep = parser.loadRep(args.rep)
    if getattr(args, 'group', None):
        G = parser.loadGroup(args.group)
        if not G.same_as(rep.group):
            raise ValidationError(f"Error: the representation in {args.rep} is not over the group in {args.group}.")
    return rep


def _rerun_verification(ueb_elements, rep, tol):
    report = verify_ueb(ueb_elements, tol)
    try:
        sigma = verify_equivariance(ueb_elements, rep, tol)
    except AmbiguousMatchError as e:
        logger.warning(str(e))
        sigma = None
    return report, sigma


def analyze(rep, tol, seed, out_dir, parser, bundle_name='constructed_bundle.json'):
    """
    Decides existence of an equivariant UEB as far as the available tests allow.

    Returns:
    - analysis report as a dict; verdict is IMPOSSIBLE, CONSTRUCTED or UNKNOWN.
    """
    G = rep.group
    end = end_character(rep, tol)
    basics = basic_permutation_characters(G)
    certificate = decompose_into_basics(end, basics, tol)
    basic_rows = [list(chi.as_integers(tol)) for _, chi in basics]
    report = {
        'tool_version': TOOL_VERSION,
        'tolerance': tol.epsilon,
        'seed': seed,
        'verdict': None,
        'evidence': {},
        'end_character': class_function_to_json(end, tol)['values'],
        'class_representatives': [G.perms[g].tolist() for g in G.class_representatives],
        'certificate': parser.certificateToJson(certificate),
        'bundle': None,
    }
    if not certificate.feasible:
        report['verdict'] = IMPOSSIBLE
        report['evidence'] = {
            'reason': 'end character is not a non-negative integer sum of basic permutation characters',
            'basic_characters': basic_rows,
        }
        return report

    try:
        B, X = find_equivariant_onb(rep, tol, seed=seed)
    except InfeasibleError as e:
        report['verdict'] = UNKNOWN
        report['evidence'] = {
            'reason': 'end character is feasible but the representation has no equivariant orthonormal basis',
            'onb_certificate': parser.certificateToJson(e.certificate),
        }
        return report
    except ConstructionFailedError as e:
        report['verdict'] = UNKNOWN
        report['evidence'] = {'reason': str(e)}
        return report

    if rep.dimension > MAX_DIMENSION_GUARANTEED:
        report['verdict'] = UNKNOWN
        report['evidence'] = {
            'reason': f'equivariant orthonormal basis found but dimension {rep.dimension} > {MAX_DIMENSION_GUARANTEED}; '
                      'supply a commuting Hadamard to construct',
        }
        return report

    try:
        gueb = construct_gueb_dim_le4(change_basis(rep, B, tol), tol)
        gueb = conjugate_ueb(gueb, B, rep, tol)
    except CertificationError as e:
        report['verdict'] = UNKNOWN
        report['evidence'] = {'reason': str(e)}
        return report

    bundle_path = os.path.join(out_dir, bundle_name)
    saveJson(parser.bundleToJson(gueb), bundle_path)
    ueb_report, sigma = _rerun_verification(parser.loadBundle(bundle_path).elements, rep, tol)
    if not ueb_report.valid or sigma is None:
        report['verdict'] = UNKNOWN
        report['evidence'] = {'reason': 'constructed bundle failed re-verification after writing'}
        return report
    report['verdict'] = CONSTRUCTED
    report['evidence'] = {
        'permuted_basis_size': X.size,
        'unitarity_defect': ueb_report.unitarity_defect,
        'orthogonality_defect': ueb_report.orthogonality_defect,
    }
    report['bundle'] = bundle_name
    return report


def cmd_analyze(args):
    tol = as_tolerance(args.tol)
    parser = _parser_for(args)
    rep = _load_rep(args, parser)
    print("=== Step 1: Analyzing Representation ===")
    report = analyze(rep, tol, args.seed, args.out, parser)
    saveJson(report, os.path.join(args.out, 'analysis.json'))
    print(f"Group: {rep.group.label} (order {rep.group.order}), dimension {rep.dimension}")
    print(f"End character: {report['end_character']}")
    print(f"Verdict: {report['verdict']}")
    if report['bundle']:
        print(f"Bundle: {os.path.join(args.out, report['bundle'])}")
    if report['verdict'] == UNKNOWN and args.require_answer:
        return EXIT_UNKNOWN
    return EXIT_OK


def cmd_construct(args):
    tol = as_tolerance(args.tol)
    parser = _parser_for(args)
    kind, value = parser.loadInput(args.input)
    rep = permutation_representation(value) if kind == 'gset' else value
    if is_permutation_basis(rep, tol) is None:
        raise ValidationError("Error: the representation is not given in a permutation basis.")
    print("=== Step 1: Constructing G-equivariant UEB ===")
    if args.hadamard:
        gueb = construct_gueb_from_hadamard(rep, parser.loadMatrix(args.hadamard), tol)
    else:
        gueb = construct_gueb_dim_le4(rep, tol)
    saveJson(parser.bundleToJson(gueb), os.path.join(args.out, 'bundle.json'))
    if kind == 'gset':
        saveJson(parser.repToJson(rep), os.path.join(args.out, 'rep.json'))
    print(f"Certified {len(gueb.elements)}-element basis for {rep.group.label} "
          f"({gueb.base.provenance.get('diag_convention')} convention)")
    return EXIT_OK


def cmd_verify(args):
    tol = as_tolerance(args.tol)
    parser = _parser_for(args)
    rep = _load_rep(args, parser)
    ueb = parser.loadBundle(args.bundle)
    print("=== Step 1: Verifying Bundle ===")
    report, sigma = _rerun_verification(ueb.elements, rep, tol)
    data = {
        'tool_version': TOOL_VERSION,
        'tolerance': tol.epsilon,
        'valid': report.valid,
        'unitarity_defect': report.unitarity_defect,
        'orthogonality_defect': report.orthogonality_defect,
        'worst_unitary_index': report.worst_unitary_index,
        'worst_pair': list(report.worst_pair),
        'equivariant': sigma is not None,
        'sigma': {str(g): row.tolist() for g, row in enumerate(sigma)} if sigma is not None else None,
    }
    saveJson(data, os.path.join(args.out, 'verification.json'))
    print(f"UEB valid: {report.valid} (unitarity {report.unitarity_defect:.3e}, "
          f"orthogonality {report.orthogonality_defect:.3e})")
    print(f"Equivariant: {sigma is not None}")
    return EXIT_OK if report.valid and sigma is not None else EXIT_CERTIFICATION


def simulate(rep, ueb, procedure, args, parser, file_name=None):
    tol = as_tolerance(args.tol)
    spec = ProtocolSpec(rep, ueb, procedure)
    report = sweep(spec, trials=args.trials, seed=args.seed, tol=tol,
                   workers=getattr(args, 'workers', 1), progress=not args.quiet)
    saveJson(parser.fidelityReportToJson(report), os.path.join(args.out, file_name or f'fidelity_{procedure}.json'))
    print(f"{procedure}: global_min = {report.global_min:.12f}, global_max = {report.global_max:.12f}, "
          f"min purity = {report.min_purity:.6f}")
    return report


def cmd_simulate(args):
    tol = as_tolerance(args.tol)
    parser = _parser_for(args)
    rep = _load_rep(args, parser)
    ueb = parser.loadBundle(args.bundle)
    print("=== Step 1: Simulating Teleportation ===")
    report = simulate(rep, ueb, args.procedure, args, parser)
    if args.expect_perfect and not report.is_perfect(PERFECT_SLACK * tol.epsilon):
        logger.error(f"Fidelity {report.global_min:.12f} is below 1 - {PERFECT_SLACK} x tolerance")
        return EXIT_CERTIFICATION
    return EXIT_OK


def cmd_demo(args):
    if args.name not in DEMO_NAMES:
        raise ValidationError(f"Error: unknown demo {args.name!r}; available: {DEMO_NAMES}.")
    tol = as_tolerance(args.tol)
    parser = _parser_for(args)
    rep, gueb = builtin_z2_example(tol)

    print("=== Step 1: Writing Built-in Example ===")
    saveJson(parser.groupToJson(rep.group), os.path.join(args.out, 'group.json'))
    saveJson(parser.repToJson(rep, group_ref='group.json'), os.path.join(args.out, 'rep.json'))
    saveJson(parser.bundleToJson(gueb), os.path.join(args.out, 'bundle.json'))
    a = rep.group.index_of(rep.group.generators[0])
    for i, j in enumerate(gueb.sigma[a]):
        print(f"π(a) U_{i} π(a)† = U_{j}")

    print("=== Step 2: Analyzing ===")
    report = analyze(rep, tol, args.seed, args.out, parser)
    saveJson(report, os.path.join(args.out, 'analysis.json'))
    print(f"Verdict: {report['verdict']}")

    print("=== Step 3: Simulating ===")
    for procedure in ('unspeakable', 'speakable'):
        simulate(rep, gueb.base, procedure, args, parser)
    return EXIT_OK


def cmd_subgroups(args):
    parser = _parser_for(args)
    G = parser.loadGroup(args.group)
    tol = as_tolerance(args.tol)
    print(f"=== Subgroup Classes of {G.label} (order {G.order}) ===")
    rows = []
    for H, chi in basic_permutation_characters(G):
        values = list(chi.as_integers(tol))
        rows.append({'subgroup_order': H.order, 'members': list(H.members), 'coset_space_size': G.order // H.order,
                     'character': values})
        print(f"|H| = {H.order:<4} |G/H| = {G.order // H.order:<4} character = {tuple(values)}")
    data = {
        'tool_version': TOOL_VERSION,
        'group': parser.groupToJson(G),
        'class_representatives': [G.perms[g].tolist() for g in G.class_representatives],
        'rows': rows,
    }
    saveJson(data, os.path.join(args.out, 'subgroups.json'))
    return EXIT_OK


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--tol', type=float, default=DEFAULT_TOLERANCE, help='Absolute entrywise tolerance')
    common.add_argument('--seed', type=int, default=DEFAULT_SEED, help='Seed for random states and basis search')
    common.add_argument('--out', type=str, default=DEFAULT_OUTPUT_DIR, help='Directory for output files')
    common.add_argument('--verbose', action='store_true', help='Log debug messages')
    common.add_argument('--quiet', action='store_true', help='Log warnings only and hide progress bars')

    parser = argparse.ArgumentParser(description='Reference-frame-independent teleportation toolkit')
    commands = parser.add_subparsers(dest='command', required=True)

    p = commands.add_parser('analyze', parents=[common], help='Decide whether a G-equivariant UEB exists')
    p.add_argument('rep', help='Representation file')
    p.add_argument('--group', help='Group file the representation must be over')
    p.add_argument('--require-answer', action='store_true', help='Exit with code 4 on an UNKNOWN verdict')
    p.set_defaults(func=cmd_analyze)

    p = commands.add_parser('construct', parents=[common], help='Construct a certified G-equivariant UEB')
    p.add_argument('input', help='G-set file or permutation-basis representation file')
    p.add_argument('--hadamard', help='File holding a Hadamard matrix commuting with the action')
    p.set_defaults(func=cmd_construct)

    p = commands.add_parser('verify', parents=[common], help='Re-verify a UEB bundle against a representation')
    p.add_argument('rep', help='Representation file')
    p.add_argument('bundle', help='UEB bundle file')
    p.add_argument('--group', help='Group file the representation must be over')
    p.set_defaults(func=cmd_verify)

    p = commands.add_parser('simulate', parents=[common], help='Sweep teleportation over all frame pairs')
    p.add_argument('rep', help='Representation file')
    p.add_argument('bundle', help='UEB bundle file')
    p.add_argument('--group', help='Group file the representation must be over')
    p.add_argument('--procedure', choices=['speakable', 'unspeakable'], default='unspeakable')
    p.add_argument('--trials', type=int, default=DEFAULT_TRIALS, help='Random input states per frame pair')
    p.add_argument('--workers', type=int, default=1, help='Threads evaluating frame pairs')
    p.add_argument('--expect-perfect', action='store_true', help='Exit with code 3 unless every fidelity is 1')
    p.set_defaults(func=cmd_simulate)

    p = commands.add_parser('demo', parents=[common], help='Write and run a built-in example')
    p.add_argument('name', help=f'One of {DEMO_NAMES}')
    p.add_argument('--trials', type=int, default=DEFAULT_TRIALS, help='Random input states per frame pair')
    p.set_defaults(func=cmd_demo)

    p = commands.add_parser('subgroups', parents=[common], help='List subgroup classes and coset-space characters')
    p.add_argument('group', help='Group file')
    p.set_defaults(func=cmd_subgroups)
    return parser


def _configure_logging(args):
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format='%(asctime)s - %(levelname)s - %(message)s')
    logging.getLogger().setLevel(level)


def _fail(exc, code):
    print(json.dumps({'error': type(exc).__name__, 'message': str(exc), 'exit_code': code}), file=sys.stderr)
    return code


def main(argv=None):
    args = build_parser().parse_args(argv)
    _configure_logging(args)
    try:
        as_tolerance(args.tol)
        return args.func(args)
    except ValidationError as e:
        return _fail(e, EXIT_VALIDATION)
    except (CertificationError, AmbiguousMatchError, InfeasibleError) as e:
        return _fail(e, EXIT_CERTIFICATION)
    except ConstructionFailedError as e:
        return _fail(e, EXIT_UNKNOWN)
    except RFIError as e:
        return _fail(e, EXIT_CERTIFICATION)


if __name__ == '__main__':
    sys.exit(main())
