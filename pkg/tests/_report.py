"""Collects one summary line per acceptance criterion for the terminal report."""
RESULTS = {}


def record(key, ok: bool, detail: str) -> bool:
    RESULTS[key] = f"criterion {key:<4} {'PASS' if ok else 'FAIL'}  {detail}"
    print(RESULTS[key])
    return ok
