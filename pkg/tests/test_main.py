import contextlib
import io
import os
import tempfile
import unittest
from unittest import mock

from config.rules import get_setting
from casegen import ChernTuple, DefectBranch, admissible_case
from certificate import CertificateWriter, load_certificate
from codim3 import ClassificationResult, LemmaReport
from main import main, parse_n_range, UsageError
from parallel_processor import SearchAborted
from search import BranchResult, Candidate, Certificate, Resolution, SearchOptions, run_case


def run_cli(*argv):
    out = io.StringIO()
    with contextlib.redirect_stdout(out):
        code = main(list(argv))
    return code, out.getvalue()


class TestParseRange(unittest.TestCase):

    def test_single_and_range(self):
        self.assertEqual(parse_n_range('14'), [14])
        self.assertEqual(parse_n_range('10..13'), [10, 11, 12, 13])

    def test_bad_ranges(self):
        for text in ('abc', '12..10', '10..'):
            with self.assertRaises(UsageError):
                parse_n_range(text)


class TestSettings(unittest.TestCase):

    def test_env_override(self):
        with mock.patch.dict(os.environ, {'DEFECT_VERIFIER_THREADS': '3'}):
            self.assertEqual(get_setting('threads'), 3)
        with mock.patch.dict(os.environ, {'DEFECT_VERIFIER_THREADS': ''}):
            self.assertEqual(get_setting('threads'), 1)

    def test_bad_override(self):
        for raw in ('0', 'many'):
            with mock.patch.dict(os.environ, {'DEFECT_VERIFIER_THREADS': raw}):
                with self.assertRaises(ValueError):
                    get_setting('threads')

    def test_unknown_setting(self):
        with self.assertRaises(KeyError):
            get_setting('colour')


class TestBoundCommand(unittest.TestCase):

    def test_codim5(self):
        code, out = run_cli('bound', '--codim', '5', '--N', '18')
        self.assertEqual(code, 0)
        self.assertIn('r=1: 9331', out)
        self.assertIn('r=3: 3906', out)

    def test_single_branch(self):
        code, out = run_cli('bound', '--codim', '3', '--N', '14', '--r', '1')
        self.assertEqual(code, 0)
        self.assertIn('r=1: 156', out)

    def test_wrong_branch(self):
        code, out = run_cli('bound', '--codim', '5', '--N', '18', '--r', '2')
        self.assertEqual(code, 2)
        self.assertIn('r-branch', out)

    def test_inadmissible_case(self):
        code, out = run_cli('bound', '--codim', '5', '--N', '17')
        self.assertEqual(code, 2)
        self.assertIn('N>=4m-2', out)


class TestSeqCommand(unittest.TestCase):

    def test_order_three(self):
        code, out = run_cli('seq', '--coeffs', '3,9,27', '--len', '11')
        self.assertEqual(code, 0)
        self.assertIn('s = 1, 3, 0, 0, 81, 243, 0, 0, 6561, 19683, 0, 0', out)
        self.assertIn('u = 0, 0, 1, 3, 0, 0, 81, 243, 0, 0, 6561, 19683, 0, 0', out)

    def test_period_six(self):
        code, out = run_cli('seq', '--coeffs', '4,8,8', '--len', '11')
        self.assertEqual(code, 0)
        self.assertIn('s = 1, 4, 8, 8, 0, 0, 64, 256, 512, 512, 0, 0', out)

    def test_zero_coefficients(self):
        code, out = run_cli('seq', '--coeffs', '1,0,0', '--len', '5')
        self.assertEqual(code, 0)
        self.assertIn('s = 1, 1, 1, 1, 1, 1', out)
        self.assertIn('u-sequence not shown', out)

    def test_bad_coefficients(self):
        self.assertEqual(run_cli('seq', '--coeffs', '1,x', '--len', '5')[0], 2)
        self.assertEqual(run_cli('seq', '--coeffs', '3,9,27', '--len', '-1')[0], 2)


class TestClassifyCommand(unittest.TestCase):

    def test_unit_grid(self):
        code, out = run_cli('classify', '--cmax', '1')
        self.assertEqual(code, 0)
        self.assertIn('(1, 1, 1) -> m=4', out)
        self.assertIn('m=4: 1', out)

    def test_empty_grid(self):
        code, out = run_cli('classify', '--cmax', '0')
        self.assertEqual(code, 0)
        self.assertIn('No double-zero sequences found', out)

    def test_short_horizon(self):
        self.assertEqual(run_cli('classify', '--cmax', '3', '--horizon', '9')[0], 2)

    def test_anomaly_exit_code(self):
        report = LemmaReport(c1=1, c2=1, c3=1, m=4, d=1, root=1, divides=False, classified=True,
                             anomaly='remainder is not zero')
        result = ClassificationResult(patterns={(1, 1, 1): 4}, reports={(1, 1, 1): report})
        with mock.patch('main.brute_force_classify', return_value=result):
            code, out = run_cli('classify', '--cmax', '1')
        self.assertEqual(code, 3)
        self.assertIn('remainder is not zero', out)


class TestVerifyCommand(unittest.TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.out_dir = os.path.join(self.tmp.name, 'certs')

    def tearDown(self):
        self.tmp.cleanup()

    def written(self):
        if not os.path.isdir(self.out_dir):
            return []
        return sorted(os.listdir(self.out_dir))

    def test_even_search_with_propagation(self):
        code, _ = run_cli('verify', '--codim', '3', '--N', '10..11', '--even-only', '--propagate',
                          '--out', self.out_dir)
        self.assertEqual(code, 0)
        self.assertEqual(self.written(), ['codim3_N10.json', 'codim3_N11.json'])
        searched = load_certificate(os.path.join(self.out_dir, 'codim3_N10.json'))
        propagated = load_certificate(os.path.join(self.out_dir, 'codim3_N11.json'))
        self.assertEqual(searched.resolution, Resolution.SEARCHED)
        self.assertTrue(searched.verdict)
        self.assertEqual(propagated.resolution, Resolution.PROPAGATED)
        self.assertEqual(propagated.provenance['propagated_from_N'], '10')

    def test_propagate_without_even_only(self):
        code, _ = run_cli('verify', '--codim', '3', '--N', '10..12', '--propagate', '--out', self.out_dir)
        self.assertEqual(code, 0)
        resolutions = [
            load_certificate(os.path.join(self.out_dir, f'codim3_N{N}.json')).resolution for N in (10, 11, 12)
        ]
        self.assertEqual(resolutions, [Resolution.SEARCHED, Resolution.PROPAGATED, Resolution.SEARCHED])

    def test_below_codim4_range(self):
        code, out = run_cli('verify', '--codim', '4', '--N', '13', '--out', self.out_dir)
        self.assertEqual(code, 2)
        self.assertIn('4m - 2 = 14', out)

    def test_odd_without_source_is_searched(self):
        code, _ = run_cli('verify', '--codim', '3', '--N', '11', '--propagate', '--out', self.out_dir)
        self.assertEqual(code, 0)
        cert = load_certificate(os.path.join(self.out_dir, 'codim3_N11.json'))
        self.assertEqual(cert.resolution, Resolution.SEARCHED)

    def test_prior_certificate_as_source(self):
        prior_path = CertificateWriter(self.tmp.name).write_certificate(run_case(admissible_case(10, 3)))
        code, _ = run_cli('verify', '--codim', '3', '--N', '11', '--propagate', '--prior', prior_path,
                          '--out', self.out_dir)
        self.assertEqual(code, 0)
        cert = load_certificate(os.path.join(self.out_dir, 'codim3_N11.json'))
        self.assertEqual(cert.resolution, Resolution.PROPAGATED)
        self.assertEqual(cert.provenance['source'], os.path.abspath(prior_path))

    def test_theorem51_skips_even(self):
        code, out = run_cli('verify', '--codim', '3', '--N', '11..14', '--theorem51', '--out', self.out_dir)
        self.assertEqual(code, 0)
        self.assertEqual(self.written(), ['codim3_N11.json', 'codim3_N13.json'])
        self.assertIn('skipped N=12', out)
        cert = load_certificate(os.path.join(self.out_dir, 'codim3_N13.json'))
        self.assertEqual(cert.resolution, Resolution.DEDUCED)

    def test_theorem51_needs_codim3(self):
        code, _ = run_cli('verify', '--codim', '4', '--N', '15', '--theorem51', '--out', self.out_dir)
        self.assertEqual(code, 2)
        self.assertEqual(self.written(), [])

    def test_inadmissible_range_writes_nothing(self):
        code, out = run_cli('verify', '--codim', '5', '--N', '17..19', '--out', self.out_dir)
        self.assertEqual(code, 2)
        self.assertIn('N>=4m-2', out)
        self.assertEqual(self.written(), [])

    def test_csv_summary(self):
        code, _ = run_cli('verify', '--codim', '3', '--N', '10', '--format', 'csv', '--out', self.out_dir)
        self.assertEqual(code, 0)
        self.assertEqual(self.written(), ['codim3_N10.json', 'summary.csv'])

    def test_candidates_exit_code(self):
        case = admissible_case(10, 3)
        branch = DefectBranch(r=1, c1=3)
        cand = Candidate(chern=ChernTuple((3, 0, 0), branch, case), n=case.n, degree=4)
        cert = Certificate(
            case=case,
            branches=[BranchResult(branch=branch, tuples_enumerated=145, tuples_pruned_early=0, candidates=[cand])],
            options=SearchOptions(),
            verdict=False,
            wall_time=0.0,
        )
        with mock.patch('main.run_case', return_value=cert):
            code, out = run_cli('verify', '--codim', '3', '--N', '10', '--out', self.out_dir)
        self.assertEqual(code, 1)
        self.assertIn('inconclusive', out)
        self.assertFalse(load_certificate(os.path.join(self.out_dir, 'codim3_N10.json')).verdict)

    def test_abort_removes_partial_output(self):
        first = run_case(admissible_case(10, 3))
        with mock.patch('main.run_case', side_effect=[first, SearchAborted('worker pool terminated abruptly')]):
            code, out = run_cli('verify', '--codim', '3', '--N', '10..12', '--even-only', '--out', self.out_dir)
        self.assertEqual(code, 4)
        self.assertIn('aborted', out)
        self.assertEqual(self.written(), [])

    def test_unexpected_error_removes_partial_output(self):
        first = run_case(admissible_case(10, 3))
        with mock.patch('main.run_case', side_effect=[first, RuntimeError('disk controller reset')]):
            with self.assertRaises(RuntimeError):
                run_cli('verify', '--codim', '3', '--N', '10..12', '--even-only', '--out', self.out_dir)
        self.assertEqual(self.written(), [])

    def test_env_file_sets_output_directory(self):
        env_path = os.path.join(self.tmp.name, '.env.local')
        with open(env_path, 'w', encoding='utf-8') as f:
            f.write(f"DEFECT_VERIFIER_OUT={self.out_dir}\n")
        with mock.patch.dict(os.environ, {}):
            os.environ.pop('DEFECT_VERIFIER_OUT', None)
            code, _ = run_cli('--env-file', env_path, 'verify', '--codim', '3', '--N', '10')
        self.assertEqual(code, 0)
        self.assertEqual(self.written(), ['codim3_N10.json'])

    def test_missing_env_file(self):
        code, _ = run_cli('--env-file', os.path.join(self.tmp.name, 'nope'), 'bound', '--codim', '3', '--N', '10')
        self.assertEqual(code, 2)

    def test_missing_arguments(self):
        with self.assertRaises(SystemExit) as ctx:
            run_cli('verify', '--codim', '3')
        self.assertEqual(ctx.exception.code, 2)


if __name__ == '__main__':
    unittest.main()
