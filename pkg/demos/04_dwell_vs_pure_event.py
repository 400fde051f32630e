#!/usr/bin/env python3
"""Dwell-enforced triggering vs a pure event baseline, batch statistics.

Reproduces the inter-transmission-time comparison for the planar
state-feedback benchmark: 200 seeded initial conditions with
|(x, e)| <= 100, horizon 10 s.  The dwell-enforced mechanism guarantees
every gap is at least T = 0.075; the baseline (same threshold, no dwell)
transmits whenever the event fires and produces smaller gaps.

Pass a smaller run count as the first argument for a quick look, e.g.
`python demos/04_dwell_vs_pure_event.py 30`.
"""

import os
import sys
import time

from etclab import BatchSpec, SimSettings, TriggerConfig, emit_report, run_batch, tabuada_loop

n_runs = int(sys.argv[1]) if len(sys.argv) > 1 else 200

loop, cert = tabuada_loop()
sim = SimSettings(step=1e-3, horizon_t=10.0, event_tol=1e-6, record_states=False)

print(f"system: {loop.name}, gamma = {cert.gamma:.4f}, L = {cert.L:.4f}")
print(f"{n_runs} initial conditions, |(x, e)| <= 100, horizon 10 s, sigma = 0.7")
print()

results = {}
for label, trigger in [
    ("dwell-enforced (T = 0.075)", TriggerConfig(mode="state-feedback", T=0.075, sigma=0.7)),
    ("pure event (T = 0)", TriggerConfig(mode="pure-event", T=0.0, sigma=0.7)),
]:
    spec = BatchSpec(
        n_runs=n_runs, radius=100.0, horizon_t=10.0, seed=0, trigger=trigger, sim=sim
    )
    t0 = time.perf_counter()
    report = run_batch(loop, cert, spec)
    results[label] = report
    print(
        f"{label:28s}  tau_min = {report.tau_min:.4f}  tau_avg = {report.tau_avg:.4f}  "
        f"events = {report.n_events_total}  ({time.perf_counter() - t0:.0f} s)"
    )

dwell = results["dwell-enforced (T = 0.075)"]
baseline = results["pure event (T = 0)"]
print()
print("what to notice:")
print(f"  - the dwell batch attains its bound exactly: tau_min = {dwell.tau_min:.4f}")
print(f"  - the baseline has no such floor: tau_min = {baseline.tau_min:.4f}")
print(f"  - enforcing the dwell time raises the average gap "
      f"({baseline.tau_avg:.4f} -> {dwell.tau_avg:.4f}) at no cost to stability")

outdir = os.path.join(os.path.dirname(__file__), "output")
emit_report(dwell, os.path.join(outdir, "batch_dwell"))
emit_report(baseline, os.path.join(outdir, "batch_pure_event"))
print()
print(f"wrote summary.json and events.csv under {outdir}/batch_dwell and "
      f"{outdir}/batch_pure_event")
