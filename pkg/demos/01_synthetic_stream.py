"""Generate a synthetic tweet/deletion event stream with a ground-truth
ledger, and peek at what it contains.

The generator stands in for live collection: every event it emits is
recorded in a ledger together with the planted truth (deletion flags,
filter classes, superficial pairs), which is what the test suite checks
the pipeline against.
"""

import json
import tempfile
from collections import Counter
from pathlib import Path

from regretstream.synth import SynthConfig, write_synthetic

outdir = Path(tempfile.mkdtemp(prefix="regretstream-demo-"))
events_path = outdir / "events.jsonl"
ledger_path = outdir / "ledger.jsonl"

# A small stream; the shipped defaults (seed 42, ~20k tweets) use the same knobs.
cfg = SynthConfig(seed=7, n_users=120, tweet_rate_min=1.5, tweet_rate_max=2.2)
summary = write_synthetic(cfg, events_path, ledger_path)

print(f"wrote {events_path}")
print(f"tweet events:  {summary['total_tweet_events']}")
print(f"delete events: {summary['total_delete_events']}")
print(f"composition planted for the cleanup cascade:")
for stage, counts in summary["stages"].items():
    print(f"  {stage:16s} removed={counts['removed']:5d} "
          f"(deleted among them: {counts['removed_deleted']})")
print(f"retained after cleanup: {summary['retained']}")

# The first few wire-format lines:
with open(events_path) as fh:
    for _, line in zip(range(3), fh):
        ev = json.loads(line)
        brief = {k: ev[k] for k in ("kind", "id", "user_id") if k in ev}
        print("event:", brief)

# Ledger records carry per-event ground truth.
kinds = Counter()
with open(ledger_path) as fh:
    for line in fh:
        kinds[json.loads(line)["kind"]] += 1
print("ledger records by kind:", dict(kinds))
