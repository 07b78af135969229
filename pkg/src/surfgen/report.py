"""Search-cost report: CSV tables plus PNG charts."""

from __future__ import annotations

import csv
import io
import os
from typing import Optional, Sequence

from .engine import GenSession, ShdgSession
from .grammar import Grammar, NormalGrammar
from .tables import DepthConfig, GenTables, compile_tables, optimize_depths, reductive_score
from .term import Term, format_term, parse_term

__all__ = ["DEFAULT_LFS", "cost_rows", "trace_rows", "write_report"]

DEFAULT_LFS = (
    "sleep(john)",
    "see(mary,john)",
    "mod(sleep(john),ynq)",
    "mod(mod(sleep(john),today),ynq)",
    "mod(mod(see(mary,john),in(paris)),ynq)",
    "mod(mod(mod(sleep(john),today),in(paris)),ynq)",
    "mod(mod(mod(mod(see(paris,mary),today),in(john)),today),ynq)",
)

COST_FIELDS = ("lf", "realizations", "shdg_attempts", "table_attempts_depth1",
               "table_attempts_auto")
TRACE_FIELDS = ("step", "lookahead", "reductive_max", "states")


def cost_rows(src: Grammar, base: GenTables, tuned: GenTables, lfs: Sequence[Term]) -> list:
    rows = []
    for lf in lfs:
        sh = ShdgSession(src)
        n = sum(1 for _ in sh.run(base.top, lf))
        counts = []
        for t in (base, tuned):
            s = GenSession(t)
            for _ in s.run(lf):
                pass
            counts.append(s.attempts)
        rows.append({"lf": format_term(lf), "realizations": n, "shdg_attempts": sh.attempts,
                     "table_attempts_depth1": counts[0], "table_attempts_auto": counts[1]})
    return rows


def trace_rows(trace: Sequence[tuple]) -> list:
    return [{"step": i, "lookahead": desc, "reductive_max": m, "states": n}
            for i, (desc, m, n) in enumerate(trace)]


def _csv(rows: list, fields: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(fields), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def _plot_cost(rows: list, path: str) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    labels = [str(i + 1) for i in range(len(rows))]
    xs = range(len(rows))
    w = 0.27
    fig, ax = plt.subplots(figsize=(8, 4))
    ax.bar([x - w for x in xs], [r["shdg_attempts"] for r in rows], w, label="head-driven")
    ax.bar(list(xs), [r["table_attempts_depth1"] for r in rows], w, label="tables, depth 1")
    ax.bar([x + w for x in xs], [r["table_attempts_auto"] for r in rows], w, label="tables, tuned")
    ax.set_yscale("log")
    ax.set_xticks(list(xs))
    ax.set_xticklabels(labels)
    ax.set_xlabel("logical form (row of cost.csv)")
    ax.set_ylabel("attempts")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)


def _plot_trace(rows: list, path: str) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    steps = [r["step"] for r in rows]
    ax.plot(steps, [r["reductive_max"] for r in rows], marker="o", label="worst reductive state")
    ax.set_xlabel("optimizer step")
    ax.set_ylabel("reduce candidates")
    ax2 = ax.twinx()
    ax2.plot(steps, [r["states"] for r in rows], marker="s", color="tab:orange", label="states")
    ax2.set_ylabel("states")
    ax.set_xticks(steps)
    fig.legend(loc="upper right")
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)


def write_report(src: Grammar, g: NormalGrammar, out_dir: str,
                 lfs: Optional[Sequence[str]] = None, depth_cap: int = 4,
                 state_cap: int = 10000) -> dict:
    """Write cost.csv, trace.csv, cost.png and trace.png; return the CSV texts."""
    os.makedirs(out_dir, exist_ok=True)
    terms = [parse_term(x, pattern=False) for x in (lfs or DEFAULT_LFS)]
    trace: list = []
    cfg = optimize_depths(g, depth_cap=depth_cap, trace=trace, state_cap=state_cap)
    base = compile_tables(g, cfg=DepthConfig(1), state_cap=state_cap)
    tuned = compile_tables(g, cfg=cfg, state_cap=state_cap)
    cost = cost_rows(src, base, tuned, terms)
    tr = trace_rows(trace)
    texts = {"cost.csv": _csv(cost, COST_FIELDS), "trace.csv": _csv(tr, TRACE_FIELDS)}
    for name, text in texts.items():
        with open(os.path.join(out_dir, name), "w", encoding="utf-8") as f:
            f.write(text)
    _plot_cost(cost, os.path.join(out_dir, "cost.png"))
    _plot_trace(tr, os.path.join(out_dir, "trace.png"))
    texts["score"] = "reductive max depth1={} tuned={}".format(
        reductive_score(base)[0], reductive_score(tuned)[0])
    return texts
