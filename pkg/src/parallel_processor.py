"""Parallel range processing with throttled heartbeats and colored terminal output."""

import logging
import os
import sys
import threading
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from concurrent.futures.process import BrokenProcessPool
from typing import Any, Callable, List, Optional, Sequence

logger = logging.getLogger(__name__)


class SearchAborted(RuntimeError):
    """The run stopped for a non-mathematical reason; no verdict may be drawn."""


class Colors:
    """ANSI color codes for terminal output."""
    RESET = '\033[0m'
    BOLD = '\033[1m'
    DIM = '\033[2m'

    RED = '\033[91m'
    GREEN = '\033[92m'
    YELLOW = '\033[93m'
    CYAN = '\033[96m'
    WHITE = '\033[97m'

    @staticmethod
    def supports_color(stream=None) -> bool:
        """Colors only for an interactive terminal, and never when NO_COLOR is set."""
        if os.environ.get('NO_COLOR'):
            return False
        isatty = getattr(stream or sys.stdout, 'isatty', None)
        return bool(isatty and isatty())


class ProgressPrinter:
    """Prints case headers, verdicts and run summaries to the terminal."""

    def __init__(self, use_color: bool = True, stream=None):
        self.use_color = use_color and Colors.supports_color(stream)
        self.stream = stream
        self._lock = threading.Lock()

    def _c(self, text: str, color: str) -> str:
        """Apply color to text if colors are enabled."""
        if self.use_color:
            return f"{color}{text}{Colors.RESET}"
        return text

    def _print(self, *args, **kwargs):
        print(*args, file=self.stream or sys.stdout, **kwargs)

    def print_case_header(self, N: int, m: int, idx: int, total: int, resolution: str):
        with self._lock:
            header = f"[{idx}/{total}] N={N}, m={m} • {resolution}"
            self._print(f"\n{self._c('━' * 70, Colors.DIM)}")
            self._print(self._c(header, Colors.BOLD + Colors.CYAN))

    def print_branch(self, r: int, c1: int, enumerated: int, pruned: int, candidates: int):
        with self._lock:
            line = f"  r={r} c1={c1}: enumerated {enumerated}, pruned early {pruned}"
            if candidates:
                self._print(self._c(f"{line}, ✗ {candidates} candidate(s)", Colors.RED + Colors.BOLD))
            else:
                self._print(self._c(f"{line}, ✓ no candidates", Colors.GREEN))

    def print_verdict(self, verdict: bool, detail: str = ''):
        with self._lock:
            if verdict:
                text = self._c("  ✓ True", Colors.GREEN + Colors.BOLD)
            else:
                text = self._c("  ✗ False (inconclusive: candidates found)", Colors.RED + Colors.BOLD)
            if detail:
                text += self._c(f" - {detail}", Colors.DIM)
            self._print(text)

    def print_skip(self, N: int, reason: str):
        with self._lock:
            self._print(self._c(f"  - skipped N={N}: {reason}", Colors.YELLOW))

    def print_summary(self, verdicts: Sequence[bool], elapsed_time: float):
        """Print final summary of all cases."""
        with self._lock:
            true_count = sum(1 for v in verdicts if v)
            false_count = len(verdicts) - true_count

            self._print(f"\n{self._c('═' * 70, Colors.BOLD)}")
            self._print(self._c("VERIFICATION COMPLETE", Colors.BOLD + Colors.CYAN))
            self._print(self._c('═' * 70, Colors.BOLD))
            self._print(f"\n  {self._c('Total cases:', Colors.WHITE)} {len(verdicts)}")
            self._print(f"  {self._c('✓ True:', Colors.GREEN)} {true_count}")
            self._print(f"  {self._c('✗ False:', Colors.RED)} {false_count}")
            self._print(f"\n  {self._c('Time elapsed:', Colors.WHITE)} {elapsed_time:.1f}s")
            self._print()


class ParallelRangeProcessor:
    """Runs independent range tasks on a process pool and returns results in task order."""

    def __init__(self, max_workers: int = 1, heartbeat_seconds: float = 30.0):
        """
        Initialize the processor.

        Args:
            max_workers: Number of worker processes; 1 runs inline
            heartbeat_seconds: Minimum delay between heartbeat log lines
        """
        if max_workers < 1:
            raise ValueError(f"max_workers must be at least 1, got {max_workers}")
        self.max_workers = max_workers
        self.heartbeat_seconds = heartbeat_seconds

        self._heartbeat_lock = threading.Lock()
        self._last_heartbeat = 0.0

    def _heartbeat(self, label: str, done: int, total: int, summary: Optional[Callable[[], str]] = None,
                   force: bool = False):
        """Log a liveness line, at most once per heartbeat interval unless forced."""
        with self._heartbeat_lock:
            now = time.monotonic()
            if not force and now - self._last_heartbeat < self.heartbeat_seconds:
                return
            self._last_heartbeat = now
        extra = f" ({summary()})" if summary else ''
        logger.info("%s: %d/%d ranges done%s", label, done, total, extra)

    def process_all(self, func: Callable[..., Any], tasks: List[tuple], label: str = 'search',
                    summarize: Optional[Callable[[List[Any]], str]] = None) -> List[Any]:
        """
        Apply func to every argument tuple in tasks.

        Args:
            func: Module-level callable (must be picklable)
            tasks: Argument tuples, one per task
            label: Prefix for heartbeat lines
            summarize: Optional callable turning the finished results into a short count string

        Returns:
            Results in the same order as tasks

        Raises:
            SearchAborted: If a worker dies, memory runs out or the run is interrupted
        """
        total = len(tasks)
        results: List[Any] = [None] * total
        finished: List[Any] = []

        def summary():
            return summarize(finished) if summarize else ''

        self._last_heartbeat = time.monotonic()
        try:
            if self.max_workers == 1 or total <= 1:
                for idx, args in enumerate(tasks):
                    results[idx] = func(*args)
                    finished.append(results[idx])
                    self._heartbeat(label, idx + 1, total, summary if summarize else None)
            else:
                with ProcessPoolExecutor(max_workers=min(self.max_workers, total)) as executor:
                    futures = {executor.submit(func, *args): idx for idx, args in enumerate(tasks)}
                    for done, future in enumerate(as_completed(futures), 1):
                        idx = futures[future]
                        results[idx] = future.result()
                        finished.append(results[idx])
                        self._heartbeat(label, done, total, summary if summarize else None)
        except MemoryError as e:
            raise SearchAborted(f"{label}: out of memory") from e
        except BrokenProcessPool as e:
            raise SearchAborted(f"{label}: worker pool terminated abruptly: {e}") from e
        except KeyboardInterrupt as e:
            raise SearchAborted(f"{label}: interrupted") from e

        self._heartbeat(label, total, total, summary if summarize else None, force=True)
        return results
