"""Dataset container, CSV I/O, synthetic generators, model serialization."""

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .curves import CurveFit, FunctionFamily, BasisFunction
from .density import FAdaptedParams
from .engine import AfcecModel, ClusterModel
from .errors import InvalidSpec, IoError, ParseError, SchemaVersionMismatch

MODEL_SCHEMA = 1

GENERATOR_KINDS = ("circle", "spiral", "strokes", "parametric3d")

# five quadratic/cubic strokes laid out like a rough glyph; each entry is
# (x(t) coefficients, y(t) coefficients) in ascending powers of t, t in [-1, 1]
DEFAULT_STROKES = (
    ((0.0, 2.0), (1.8, 0.0, 0.1)),  # top bar
    ((-1.5, 0.0, 0.12), (0.0, 1.6)),  # left vertical, slightly bowed
    ((0.3, 1.2), (0.2, -1.2, 0.3)),  # falling diagonal
    ((0.0, 1.5), (-1.6, 0.0, 0.9)),  # bottom cup
    ((0.2, 1.4), (0.4, 0.0, -0.8, 0.2)),  # arch with a cubic flick
)


@dataclass(frozen=True)
class Dataset:
    """n points in R^d. Column access via col(); labels are optional
    ground-truth tags from the generators."""

    rows: np.ndarray = field(repr=False)
    labels: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=float)
        if rows.ndim != 2:
            raise ValueError("rows must be a 2-D array")
        if rows.shape[1] < 2:
            raise ValueError("need at least 2 coordinates per point")
        if not np.all(np.isfinite(rows)):
            raise ValueError("rows must be finite")
        object.__setattr__(self, "rows", rows)
        if self.labels is not None:
            labels = np.asarray(self.labels, dtype=int)
            if labels.shape != (rows.shape[0],):
                raise ValueError("labels must have one entry per row")
            object.__setattr__(self, "labels", labels)

    @property
    def n(self):
        return self.rows.shape[0]

    @property
    def d(self):
        return self.rows.shape[1]

    def col(self, j):
        return self.rows[:, j]


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    n: int = 500
    noise_sigma: float = 0.1
    seed: int = 0
    # kind-specific knobs
    radius: float = 1.0  # circle
    turns: float = 2.0  # spiral
    pitch: float = 0.25  # spiral: r = pitch * theta
    strokes: tuple = DEFAULT_STROKES  # strokes: ((x coeffs, y coeffs), ...)
    weights: tuple = None  # strokes: sampling proportions
    curve3d: object = None  # parametric3d: t in [0,1] -> (x, y, z)

    def validate(self):
        if self.kind not in GENERATOR_KINDS:
            raise InvalidSpec(f"kind must be one of {GENERATOR_KINDS}")
        if self.n < 10:
            raise InvalidSpec("n must be >= 10")
        if self.noise_sigma < 0:
            raise InvalidSpec("noise_sigma must be >= 0")


def _poly(coeffs, t):
    out = np.zeros_like(t)
    for k, c in enumerate(coeffs):
        out = out + c * t ** k
    return out


def generate(spec):
    """Synthetic datasets, pure functions of the configuration."""
    spec.validate()
    rng = np.random.default_rng(spec.seed & 0xFFFFFFFFFFFFFFFF)
    n = spec.n
    if spec.kind == "circle":
        theta = rng.uniform(0.0, 2.0 * math.pi, n)
        r = spec.radius + rng.normal(0.0, spec.noise_sigma, n)
        rows = np.column_stack([r * np.cos(theta), r * np.sin(theta)])
        labels = (theta >= math.pi).astype(int)
        return Dataset(rows, labels)
    if spec.kind == "spiral":
        theta = rng.uniform(0.5, spec.turns * 2.0 * math.pi, n)
        r = spec.pitch * theta + rng.normal(0.0, spec.noise_sigma, n)
        rows = np.column_stack([r * np.cos(theta), r * np.sin(theta)])
        labels = (theta / (2.0 * math.pi)).astype(int)
        return Dataset(rows, labels)
    if spec.kind == "strokes":
        strokes = spec.strokes
        if not strokes:
            raise InvalidSpec("strokes must be non-empty")
        w = np.asarray(spec.weights if spec.weights else [1.0] * len(strokes), dtype=float)
        if w.shape != (len(strokes),) or np.any(w <= 0):
            raise InvalidSpec("weights must be positive, one per stroke")
        labels = rng.choice(len(strokes), size=n, p=w / w.sum())
        t = rng.uniform(-1.0, 1.0, n)
        rows = np.empty((n, 2))
        for i, (cx, cy) in enumerate(strokes):
            sel = labels == i
            rows[sel, 0] = _poly(cx, t[sel])
            rows[sel, 1] = _poly(cy, t[sel])
        rows += rng.normal(0.0, spec.noise_sigma, rows.shape)
        return Dataset(rows, labels)
    # parametric3d
    curve = spec.curve3d or (lambda t: (np.cos(2 * math.pi * t), np.sin(2 * math.pi * t), 1.5 * t))
    t = rng.uniform(0.0, 1.0, n)
    parts = curve(t)
    rows = np.column_stack([np.broadcast_to(np.asarray(p, dtype=float), t.shape) for p in parts])
    rows = rows + rng.normal(0.0, spec.noise_sigma, rows.shape)
    return Dataset(rows, np.zeros(n, dtype=int))


def load_csv(path):
    """Numeric CSV with an optional single header line."""
    rows = []
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            for rix, rec in enumerate(reader, start=1):
                if not rec or (len(rec) == 1 and not rec[0].strip()):
                    continue
                vals = []
                for cix, cell in enumerate(rec, start=1):
                    try:
                        vals.append(float(cell))
                    except ValueError:
                        if rix == 1 and not rows:
                            vals = None  # header line
                            break
                        raise ParseError(
                            f"non-numeric cell {cell!r} at row {rix}, column {cix}",
                            row=rix,
                            col=cix,
                        ) from None
                if vals is not None:
                    rows.append(vals)
    except OSError as e:
        raise IoError(str(e)) from e
    if not rows:
        raise ParseError("no data rows")
    width = len(rows[0])
    for rix, r in enumerate(rows, start=1):
        if len(r) != width:
            raise ParseError(f"row {rix} has {len(r)} cells, expected {width}", row=rix)
    try:
        return Dataset(np.asarray(rows, dtype=float))
    except ValueError as e:
        raise ParseError(str(e)) from e


def save_csv(ds, path, header=True):
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            if header:
                writer.writerow([f"x{i}" for i in range(ds.d)])
            for row in ds.rows:
                writer.writerow([repr(float(v)) for v in row])
    except OSError as e:
        raise IoError(str(e)) from e


def _basis_to_json(b):
    if b.tag == "custom":
        raise IoError("custom basis functions are not serializable")
    return {"tag": b.tag, "exponents": list(b.exponents)}


def _family_to_json(fam):
    return {
        "kind": fam.kind,
        "input_dim": fam.input_dim,
        "basis": [_basis_to_json(b) for b in fam.basis],
    }


def _family_from_json(obj):
    basis = tuple(
        BasisFunction(b["tag"], tuple(int(e) for e in b["exponents"])) for b in obj["basis"]
    )
    return FunctionFamily(int(obj["input_dim"]), basis, obj.get("kind", "custom"))


def model_to_json(model):
    clusters = []
    for cl in model.clusters:
        p = cl.params
        clusters.append(
            {
                "dependent_axis": int(p.dependent_axis),
                "mean_exp": p.mean_exp.tolist(),
                "cov_exp": p.cov_exp.tolist(),
                "resid_var": p.resid_var,
                "mean_dep": p.mean_dep,
                "curve": {
                    "family": _family_to_json(p.curve.family),
                    "coeffs": np.asarray(p.curve.coeffs, dtype=float).tolist(),
                    "sse": p.curve.sse,
                },
                "weight": cl.weight,
                "size": int(cl.size),
                "cross_entropy": cl.cross_entropy,
            }
        )
    return {
        "schema": MODEL_SCHEMA,
        "clusters": clusters,
        "assignment": [int(a) for a in model.assignment],
        "cost_trace": list(model.cost_trace),
        "iterations": int(model.iterations),
        "deleted_count": int(model.deleted_count),
        "deletion_iterations": [int(i) for i in model.deletion_iterations],
    }


def model_from_json(obj):
    if obj.get("schema") != MODEL_SCHEMA:
        raise SchemaVersionMismatch(f"schema {obj.get('schema')!r}, expected {MODEL_SCHEMA}")
    clusters = []
    for c in obj["clusters"]:
        fam = _family_from_json(c["curve"]["family"])
        curve = CurveFit(fam, np.asarray(c["curve"]["coeffs"], dtype=float), c["curve"]["sse"])
        params = FAdaptedParams(
            dependent_axis=int(c["dependent_axis"]),
            mean_exp=np.asarray(c["mean_exp"], dtype=float),
            cov_exp=np.asarray(c["cov_exp"], dtype=float),
            resid_var=c["resid_var"],
            curve=curve,
            mean_dep=c["mean_dep"],
        )
        clusters.append(
            ClusterModel(params, c["weight"], int(c["size"]), c["cross_entropy"])
        )
    return AfcecModel(
        clusters=clusters,
        assignment=np.asarray(obj["assignment"], dtype=int),
        cost_trace=[float(v) for v in obj["cost_trace"]],
        iterations=int(obj["iterations"]),
        deleted_count=int(obj["deleted_count"]),
        deletion_iterations=[int(i) for i in obj.get("deletion_iterations", [])],
    )


def save_model(model, path):
    """JSON round-trip; floats use shortest round-trip decimals, so every
    numeric field reloads bit-identical."""
    try:
        with open(path, "w") as fh:
            json.dump(model_to_json(model), fh, indent=1)
    except OSError as e:
        raise IoError(str(e)) from e


def load_model(path):
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except OSError as e:
        raise IoError(str(e)) from e
    except json.JSONDecodeError as e:
        raise IoError(f"invalid JSON: {e}") from e
    return model_from_json(obj)


CURVE_SAMPLES = 200


def export_plot_data(x, model, path):
    """CSV for plotting: every point with its assigned cluster, then for each
    cluster 200 samples of its fitted curve.

    Columns: kind,cluster,c0,...,c{d-1}. Point rows carry the data coordinates;
    curve rows walk the straight segment between the cluster's explanatory
    min and max corners and place coordinate j on the fitted curve.
    """
    rows_arr = getattr(x, "rows", x)
    rows_arr = np.asarray(rows_arr, dtype=float)
    d = rows_arr.shape[1]
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["kind", "cluster"] + [f"c{i}" for i in range(d)])
            for row, a in zip(rows_arr, model.assignment):
                writer.writerow(["point", int(a)] + [repr(float(v)) for v in row])
            for i, cl in enumerate(model.clusters):
                j = cl.params.dependent_axis
                members = rows_arr[np.asarray(model.assignment) == i]
                xe = np.delete(members, j, axis=1)
                lo, hi = xe.min(axis=0), xe.max(axis=0)
                frac = np.linspace(0.0, 1.0, CURVE_SAMPLES)[:, None]
                path_pts = lo + frac * (hi - lo)
                vals = cl.params.curve.evaluate(path_pts) + cl.params.mean_dep
                for pt, v in zip(path_pts, vals):
                    coords = list(pt[:j]) + [v] + list(pt[j:])
                    writer.writerow(["curve", i] + [repr(float(c)) for c in coords])
    except OSError as e:
        raise IoError(str(e)) from e
