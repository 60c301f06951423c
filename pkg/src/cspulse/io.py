"""Instance files, pipeline reports and CSV plot data.

Instance files are JSON documents::

    {"name": "h2", "n_qubits": 4,
     "terms": [["IIII", -0.09], ["ZIII", 0.17], ...],
     "reference_energy": -1.137, "metadata": {"basis": "sto-3g"}}

Labels are big-endian: the leftmost character acts on qubit 0.
"""

from __future__ import annotations

import csv
import io as _io
import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from .errors import DimensionError, ParseError
from .pauli import PauliString, PauliSum


@dataclass(frozen=True)
class ProblemInstance:
    name: str
    hamiltonian: PauliSum
    reference_energy: float | None = None
    metadata: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.hamiltonian) == 0:
            raise ValueError("instance Hamiltonian has no terms")
        if self.reference_energy is not None and not math.isfinite(self.reference_energy):
            raise ValueError("reference energy must be finite")
        object.__setattr__(self, "metadata", dict(self.metadata))

    @property
    def n(self) -> int:
        return self.hamiltonian.n


def _coefficient(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        kind = "complex coefficients are not supported" if isinstance(value, (list, dict, str)) else "not a number"
        raise ParseError(f"{where}: coefficient {value!r} rejected ({kind})")
    if not math.isfinite(value):
        raise ParseError(f"{where}: coefficient {value!r} is not finite")
    return float(value)


def instance_from_dict(doc: Mapping[str, Any], source: str = "<instance>") -> ProblemInstance:
    if not isinstance(doc, Mapping):
        raise ParseError(f"{source}: top level must be an object")
    for key in ("name", "terms"):
        if key not in doc:
            raise ParseError(f"{source}: missing field {key!r}")
    raw = doc["terms"]
    if not isinstance(raw, list) or not raw:
        raise ParseError(f"{source}: field 'terms' must be a nonempty list")
    n = doc.get("n_qubits")
    terms = []
    for i, entry in enumerate(raw):
        where = f"{source}: terms[{i}]"
        if not isinstance(entry, (list, tuple)) or len(entry) != 2 or not isinstance(entry[0], str):
            raise ParseError(f"{where}: expected [pauli_string, coefficient]")
        label, coeff = entry
        try:
            p = PauliString.from_label(label)
        except ValueError as exc:
            raise ParseError(f"{where}: {exc}") from exc
        if n is None:
            n = p.n
        if p.n != n:
            raise DimensionError(f"{where}: string {label!r} has {p.n} qubits, expected {n}")
        terms.append((p, _coefficient(coeff, where)))
    ref = doc.get("reference_energy")
    if ref is not None:
        ref = _coefficient(ref, f"{source}: reference_energy")
    meta = doc.get("metadata") or {}
    if not isinstance(meta, Mapping) or not all(isinstance(k, str) and isinstance(v, str) for k, v in meta.items()):
        raise ParseError(f"{source}: metadata must map strings to strings")
    return ProblemInstance(str(doc["name"]), PauliSum(terms, n=n), ref, meta)


def instance_to_dict(inst: ProblemInstance) -> dict:
    return {
        "name": inst.name,
        "n_qubits": inst.n,
        "terms": [[p.label, c] for p, c in inst.hamiltonian.sorted_items()],
        "reference_energy": inst.reference_energy,
        "metadata": dict(sorted(inst.metadata.items())),
    }


def load_instance(path: str | Path) -> ProblemInstance:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return instance_from_dict(doc, str(path))


def save_instance(inst: ProblemInstance, path: str | Path) -> None:
    _write_text(path, json.dumps(instance_to_dict(inst), indent=1) + "\n")


def _write_text(path: str | Path, text: str) -> None:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


# ----------------------------------------------------------------------------
# reports


@dataclass
class PipelineReport:
    """Per-stage record of one pipeline run; fields of stages that did not run stay ``None``."""

    name: str | None = None
    config: dict | None = None
    seed: int | None = None
    n_original: int | None = None
    n_tapered: int | None = None
    n_contextual: int | None = None
    sector: list[int] | None = None
    symmetries: list[str] | None = None
    terms_original: int | None = None
    terms_tapered: int | None = None
    terms_noncontextual: int | None = None
    terms_contextual: int | None = None
    terms_reduced: int | None = None
    noncontextual_assignment: dict | None = None
    stabilizers: list[list] | None = None
    groups: dict | None = None
    e_nc: float | None = None
    e_c: float | None = None
    e_csvqe: float | None = None
    reference_energy: float | None = None
    reference_source: str | None = None
    error: float | None = None
    accuracy: float | None = None
    ansatz: str | None = None
    duration_dt: int | None = None
    evaluations: int | None = None
    trace: list[list] | None = None

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "PipelineReport":
        known = {f.name for f in fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ParseError(f"unknown report fields {sorted(unknown)}")
        return cls(**doc)

    def check(self, tol: float = 1e-12) -> None:
        """E_CSVQE must equal E_nc + E_c as recorded."""
        if None not in (self.e_nc, self.e_c, self.e_csvqe):
            if abs(self.e_csvqe - (self.e_nc + self.e_c)) > tol:
                raise ValueError("recorded E_CSVQE differs from E_nc + E_c")


def dumps(doc: Any) -> str:
    return json.dumps(doc, indent=1, sort_keys=True, allow_nan=False) + "\n"


def write_report(r: PipelineReport | Sequence[PipelineReport], path: str | Path) -> None:
    """A single report, or a list of reports for a sweep."""
    if isinstance(r, PipelineReport):
        r.check()
        doc = r.to_dict()
    else:
        for x in r:
            x.check()
        doc = {"reports": [x.to_dict() for x in r]}
    _write_text(path, dumps(doc))


def read_report(path: str | Path) -> PipelineReport | list[PipelineReport]:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if "reports" in doc and set(doc) == {"reports"}:
        return [PipelineReport.from_dict(d) for d in doc["reports"]]
    return PipelineReport.from_dict(doc)


# ----------------------------------------------------------------------------
# CSV


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]], config: Mapping | None = None) -> str:
    """CSV with an optional leading ``# config: {...}`` line."""
    buf = _io.StringIO()
    if config is not None:
        buf.write("# config: " + json.dumps(config, sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence[Any]],
              config: Mapping | None = None) -> None:
    _write_text(path, csv_text(header, rows, config))


def read_csv(path: str | Path) -> list[dict[str, str]]:
    lines = [ln for ln in Path(path).read_text().splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))


SWEEP_COLUMNS = ("n_target", "e_nc", "e_c", "e_csvqe", "reference_energy", "error", "accuracy", "duration_dt")
GROUP_COLUMNS = ("stage", "terms", "qubitwise", "general")
TRACE_COLUMNS = ("iteration", "energy")


def sweep_rows(reports: Sequence[PipelineReport]) -> list[list]:
    return [[r.n_contextual, r.e_nc, r.e_c, r.e_csvqe, r.reference_energy, r.error, r.accuracy, r.duration_dt]
            for r in reports]


def group_rows(report: PipelineReport) -> list[list]:
    if not report.groups:
        return []
    return [[stage, g["terms"], g["qubitwise"], g["general"]] for stage, g in sorted(report.groups.items())]
