import time


class Stopwatch:
    """Monotonic wall-clock timer usable as a context manager or by explicit laps."""

    def __init__(self):
        self.start = None
        self.elapsed = 0.0

    def __enter__(self) -> "Stopwatch":
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc) -> None:
        self.elapsed += time.perf_counter() - self.start
        self.start = None

    def lap(self) -> float:
        """Seconds since the last lap (or since entering), accumulated into elapsed."""
        now = time.perf_counter()
        span = now - self.start
        self.elapsed += span
        self.start = now
        return span
