"""Certificate serialization: one JSON document per case plus a CSV summary.

Every number is written as a decimal string so that sequence terms of any
size survive the round trip; booleans stay JSON booleans.
"""

import csv
import io
import json
import os
import sys
from typing import Any, Dict, List, Optional

# Add parent directory to path to import config
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))
from config.rules import OUTPUT_SETTINGS, SCHEMA_VERSION

from casegen import CaseSpec, ChernTuple, DefectBranch
from codim3 import DeductionRecord
from search import BranchResult, Candidate, Certificate, Resolution, SearchOptions
from utils.file_utils import read_file, remove_file, write_file


class CertificateFormatError(ValueError):
    """A certificate document is malformed or uses an unknown schema."""


def _ints(values) -> Optional[List[str]]:
    if not values:
        return None
    return [str(v) for v in values]


def _resolution_tag(cert: Certificate) -> str:
    if cert.resolution is Resolution.PROPAGATED:
        return f"propagated-from({cert.provenance['propagated_from_N']})"
    return cert.resolution.value


def _parse_resolution(tag: str) -> Resolution:
    if tag.startswith('propagated-from('):
        return Resolution.PROPAGATED
    try:
        return Resolution(tag)
    except ValueError:
        raise CertificateFormatError(f"Unknown resolution: {tag!r}")


def certificate_to_dict(cert: Certificate) -> Dict[str, Any]:
    return {
        'schema_version': SCHEMA_VERSION,
        'N': str(cert.case.N),
        'm': str(cert.case.m),
        'n': str(cert.case.n),
        'resolution': _resolution_tag(cert),
        'options': {
            'bound_variant': cert.options.bound_variant.value,
            'huh_filter': cert.options.huh_filter,
            'worker_count': str(cert.options.worker_count),
            'evidence': cert.options.evidence,
        },
        'branches': [
            {
                'r': str(branch.branch.r),
                'c1': str(branch.branch.c1),
                'enumerated': str(branch.tuples_enumerated),
                'pruned_early': str(branch.tuples_pruned_early),
                'candidates': [
                    {
                        'c': _ints(cand.c),
                        's_evidence': _ints(cand.s_evidence),
                        'degree': str(cand.degree),
                        'delta_evidence': _ints(cand.delta_evidence),
                        'huh_rejected': cand.huh_rejected,
                    }
                    for cand in branch.candidates
                ],
            }
            for branch in cert.branches
        ],
        'verdict': cert.verdict,
        'wall_time_seconds': repr(float(cert.wall_time)),
        'tool_version': cert.tool_version,
        'provenance': dict(cert.provenance),
    }


def certificate_from_dict(doc: Dict[str, Any]) -> Certificate:
    try:
        if doc['schema_version'] != SCHEMA_VERSION:
            raise CertificateFormatError(
                f"Unsupported schema version {doc['schema_version']!r} (expected {SCHEMA_VERSION!r})"
            )
        case = CaseSpec(N=int(doc['N']), m=int(doc['m']))
        opts = doc['options']
        options = SearchOptions(
            bound_variant=opts['bound_variant'],
            huh_filter=bool(opts['huh_filter']),
            worker_count=int(opts['worker_count']),
            evidence=bool(opts.get('evidence', False)),
        )

        branches = []
        for entry in doc['branches']:
            branch = DefectBranch(r=int(entry['r']), c1=int(entry['c1']))
            candidates = [
                Candidate(
                    chern=ChernTuple(c=tuple(int(v) for v in cand['c']), branch=branch, case=case),
                    n=case.n,
                    degree=int(cand['degree']),
                    s_evidence=tuple(int(v) for v in cand['s_evidence'] or ()),
                    delta_evidence=tuple(int(v) for v in cand['delta_evidence'] or ()),
                    huh_rejected=cand['huh_rejected'],
                )
                for cand in entry['candidates']
            ]
            branches.append(BranchResult(
                branch=branch,
                tuples_enumerated=int(entry['enumerated']),
                tuples_pruned_early=int(entry['pruned_early']),
                candidates=candidates,
            ))

        return Certificate(
            case=case,
            branches=branches,
            options=options,
            verdict=bool(doc['verdict']),
            wall_time=float(doc['wall_time_seconds']),
            tool_version=doc['tool_version'],
            resolution=_parse_resolution(doc['resolution']),
            provenance=dict(doc.get('provenance', {})),
        )
    except CertificateFormatError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise CertificateFormatError(f"Malformed certificate: {e!r}") from e


def dumps(cert: Certificate) -> str:
    return json.dumps(certificate_to_dict(cert), indent=2) + '\n'


def loads(text: str) -> Certificate:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise CertificateFormatError(f"Certificate is not valid JSON: {e}") from e
    return certificate_from_dict(doc)


def load_certificate(path: str) -> Certificate:
    return loads(read_file(path))


def propagated_certificate(source: Certificate, N: int, source_ref: str) -> Certificate:
    """Certificate for (N, m) carried over from a verified (N - 1, m)."""
    case = CaseSpec(N=N, m=source.case.m)
    return Certificate(
        case=case,
        branches=[],
        options=source.options,
        verdict=True,
        wall_time=0.0,
        resolution=Resolution.PROPAGATED,
        provenance={
            'propagated_from_N': str(source.case.N),
            'source': source_ref,
            'rule': 'a general hyperplane section of a positive-defect X in P^N is positive-defect in P^(N-1)',
        },
    )


def deduced_certificate(record: DeductionRecord, options: SearchOptions) -> Certificate:
    provenance = {
        'forced_defect': str(record.forced_defect),
        'pattern_index': str(record.pattern_index),
        'excluded_indices': ','.join(str(v) for v in record.excluded_indices),
    }
    for idx, step in enumerate(record.steps, 1):
        provenance[f'step_{idx}'] = step
    return Certificate(
        case=CaseSpec(N=record.N, m=3),
        branches=[],
        options=options,
        verdict=record.verdict,
        wall_time=0.0,
        resolution=Resolution.DEDUCED,
        provenance=provenance,
    )


def summary_csv(certs: List[Certificate]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(OUTPUT_SETTINGS['summary_columns'])
    for cert in certs:
        writer.writerow([
            cert.case.N,
            cert.case.m,
            _resolution_tag(cert),
            cert.verdict,
            len(cert.candidates),
            cert.tuples_enumerated,
            f"{cert.wall_time:.3f}",
        ])
    return buffer.getvalue()


class CertificateWriter:
    """Writes certificate files and remembers them so a failed run can be rolled back."""

    def __init__(self, out_dir: str):
        self.out_dir = out_dir
        self.written: List[str] = []

    def path_for(self, case: CaseSpec) -> str:
        return os.path.join(self.out_dir, f"codim{case.m}_N{case.N}.json")

    def write_certificate(self, cert: Certificate) -> str:
        path = self.path_for(cert.case)
        write_file(path, dumps(cert))
        self.written.append(path)
        return path

    def write_summary(self, certs: List[Certificate]) -> str:
        path = os.path.join(self.out_dir, OUTPUT_SETTINGS['summary_file'])
        write_file(path, summary_csv(certs))
        self.written.append(path)
        return path

    def remove_written(self) -> int:
        """Remove every file written by this writer."""
        removed = sum(1 for path in self.written if remove_file(path))
        self.written = []
        return removed
