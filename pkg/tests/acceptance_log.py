"""Collects one verdict line per acceptance criterion for the terminal summary."""

RESULTS: dict[int, tuple[bool, str]] = {}


def record(number: int, ok: bool, detail: str) -> None:
    RESULTS[number] = (ok, detail)
    print(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
