"""Batch evaluation of candidate models and report serialization."""
import csv
import hashlib
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .design import build_design_matrix
from .errors import PerfectFit, SpecError
from .evidence import log_evidence, model_posterior_probs
from .ols import fit

RECORD_FIELDS = ("label", "n", "m", "residual_norm", "log_occam", "log_gof", "log_evidence",
                 "posterior_prob")


def input_digest(*blobs):
    h = hashlib.sha256()
    for b in blobs:
        h.update(len(b).to_bytes(8, "little"))
        h.update(b)
    return h.hexdigest()


@dataclass
class RankReport:
    records: list
    metadata: dict = field(default_factory=dict)

    def to_json(self):
        return json.dumps({"metadata": self.metadata, "models": self.records}, indent=2) + "\n"

    def to_csv(self):
        buf = io.StringIO()
        for key, value in self.metadata.items():
            buf.write(f"# {key}={value}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(RECORD_FIELDS)
        for rec in self.records:
            w.writerow([repr(rec[f]) if isinstance(rec[f], float) else rec[f] for f in RECORD_FIELDS])
        return buf.getvalue()

    def render(self, fmt):
        return self.to_json() if fmt == "json" else self.to_csv()


def _evaluate(data, spec, prior):
    X = build_design_matrix(data, spec)
    f = fit(X, data[spec.response])
    try:
        return log_evidence(f, X, prior)
    except PerfectFit as exc:
        raise PerfectFit(f"model {spec.label!r} interpolates the data: {exc}") from None


def rank_models(data, specs, prior, priors=None, workers=None, metadata=None):
    """Evaluate every candidate on the shared response and rank by evidence.

    Models are evaluated on a thread pool; the report ordering depends only
    on the evidences and labels.
    """
    specs = list(specs)
    if not specs:
        raise SpecError("no models to rank")
    if len({s.response for s in specs}) > 1:
        raise SpecError("models use different response columns")
    workers = workers or min(len(specs), 8)
    if workers > 1 and len(specs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(lambda s: _evaluate(data, s, prior), specs))
    else:
        reports = [_evaluate(data, s, prior) for s in specs]
    by_label = {s.label: r for s, r in zip(specs, reports)}
    ranking = model_posterior_probs([(s.label, r) for s, r in zip(specs, reports)], priors)
    records = []
    for entry in ranking.entries:
        r = by_label[entry.label]
        records.append({
            "label": entry.label,
            "n": r.n,
            "m": r.m,
            "residual_norm": r.residual_norm,
            "log_occam": r.log_occam,
            "log_gof": r.log_gof,
            "log_evidence": r.log_evidence,
            "posterior_prob": entry.posterior_prob,
        })
    meta = {
        "k": prior.k,
        "sigma_mode": prior.sigma_mode,
        "sigma": prior.sigma,
        "bound_mode": reports[0].bound_mode,
        "A": prior.jeffreys_a,
    }
    meta.update(metadata or {})
    return RankReport(records, meta)


def parse_csv_report(text):
    """Inverse of :meth:`RankReport.to_csv` (metadata values stay strings)."""
    meta = {}
    lines = []
    for line in text.splitlines():
        if line.startswith("# "):
            key, _, value = line[2:].partition("=")
            meta[key] = value
        elif line:
            lines.append(line)
    reader = csv.DictReader(lines)
    records = []
    for row in reader:
        rec = {"label": row["label"], "n": int(row["n"]), "m": int(row["m"])}
        for f in RECORD_FIELDS[3:]:
            rec[f] = float(row[f])
        records.append(rec)
    return RankReport(records, meta)
