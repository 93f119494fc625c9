"""Shared record of acceptance outcomes, printed in the terminal summary."""

RESULTS = {}


def record(k, ok, detail):
    RESULTS[k] = (bool(ok), detail)
    line = f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(line)
    return ok
