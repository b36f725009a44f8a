"""Text field dumps: deterministic, diffable, lossless round trips.

A dump is a small header (equation, degree, point kind, mesh extents, time,
variable names) followed by one row per node holding the physical
coordinates and the conserved values, all printed with 17 significant
digits so float64 values survive the round trip bit-exactly.
"""

import io

import numpy as np

from crkfr.basis import build_basis
from crkfr.field import SolutionField
from crkfr.mesh import Mesh1D, Mesh2D

_MAGIC = "# crkfr field dump v1"


class FieldFormatError(ValueError):
    pass


def _fmt(value):
    return format(float(value), ".17g")


def write_field_text(fld):
    """Serialize a solution field to deterministic text."""
    out = io.StringIO()
    mesh = fld.mesh
    out.write(_MAGIC + "\n")
    out.write(f"equation: {fld.equation_name}\n")
    out.write(f"degree: {fld.basis.degree}\n")
    out.write(f"points: {fld.basis.kind}\n")
    if fld.dim == 1:
        out.write(f"mesh: {mesh.n_elements}\n")
        out.write(f"domain: {_fmt(mesh.xmin)} {_fmt(mesh.xmax)}\n")
    else:
        out.write(f"mesh: {mesh.nx} {mesh.ny}\n")
        out.write(
            f"domain: {_fmt(mesh.xmin)} {_fmt(mesh.xmax)} {_fmt(mesh.ymin)} {_fmt(mesh.ymax)}\n"
        )
    out.write(f"time: {_fmt(fld.time)}\n")
    out.write(f"variables: {' '.join(fld.variable_names)}\n")

    if fld.dim == 1:
        xs = mesh.node_coords(fld.basis)
        out.write("# columns: x " + " ".join(fld.variable_names) + "\n")
        for e in range(mesh.n_elements):
            for p in range(fld.basis.n_nodes):
                row = [_fmt(xs[e, p])] + [_fmt(v) for v in fld.values[e, p]]
                out.write(" ".join(row) + "\n")
    else:
        xs, ys = mesh.node_coords(fld.basis)
        out.write("# columns: x y " + " ".join(fld.variable_names) + "\n")
        for ex in range(mesh.nx):
            for ey in range(mesh.ny):
                for p in range(fld.basis.n_nodes):
                    for q in range(fld.basis.n_nodes):
                        row = [_fmt(xs[ex, ey, p, q]), _fmt(ys[ex, ey, p, q])]
                        row += [_fmt(v) for v in fld.values[ex, ey, p, q]]
                        out.write(" ".join(row) + "\n")
    return out.getvalue()


def write_field(fld, path):
    with open(path, "w") as handle:
        handle.write(write_field_text(fld))


def _parse_header(lines):
    header = {}
    idx = 0
    if not lines or lines[0].strip() != _MAGIC:
        raise FieldFormatError("not a field dump (missing magic line)")
    idx = 1
    while idx < len(lines):
        line = lines[idx].strip()
        if line.startswith("# columns:"):
            idx += 1
            break
        if not line or line.startswith("#"):
            idx += 1
            continue
        key, _, value = line.partition(":")
        if not _:
            raise FieldFormatError(f"malformed header line {line!r}")
        header[key.strip()] = value.strip()
        idx += 1
    required = {"equation", "degree", "points", "mesh", "domain", "time", "variables"}
    missing = required - set(header)
    if missing:
        raise FieldFormatError(f"missing header keys {sorted(missing)}")
    return header, idx


def read_field(path):
    """Parse a dump back into a SolutionField; inverse of write_field."""
    with open(path) as handle:
        lines = handle.read().splitlines()
    header, start = _parse_header(lines)

    degree = int(header["degree"])
    basis = build_basis(degree, header["points"])
    variables = tuple(header["variables"].split())
    mesh_extents = [int(v) for v in header["mesh"].split()]
    domain = [float(v) for v in header["domain"].split()]
    time = float(header["time"])

    data = np.loadtxt(io.StringIO("\n".join(lines[start:])), ndmin=2)
    n_vars = len(variables)
    n_nodes = degree + 1
    if len(mesh_extents) == 1:
        mesh = Mesh1D(domain[0], domain[1], mesh_extents[0])
        expected = mesh.n_elements * n_nodes
        if data.shape != (expected, 1 + n_vars):
            raise FieldFormatError(
                f"payload shape {data.shape} inconsistent with header (want {(expected, 1 + n_vars)})"
            )
        values = data[:, 1:].reshape(mesh.n_elements, n_nodes, n_vars)
        coords = data[:, 0].reshape(mesh.n_elements, n_nodes)
        if not (np.diff(coords.ravel()) > 0).all():
            raise FieldFormatError("node coordinates are not strictly increasing")
    else:
        mesh = Mesh2D(domain[0], domain[1], domain[2], domain[3], *mesh_extents)
        expected = mesh.nx * mesh.ny * n_nodes * n_nodes
        if data.shape != (expected, 2 + n_vars):
            raise FieldFormatError(
                f"payload shape {data.shape} inconsistent with header (want {(expected, 2 + n_vars)})"
            )
        values = data[:, 2:].reshape(mesh.nx, mesh.ny, n_nodes, n_nodes, n_vars)
        xs = data[:, 0].reshape(mesh.nx, mesh.ny, n_nodes, n_nodes)
        ref_x, ref_y = mesh.node_coords(basis)
        if not np.allclose(xs, ref_x, rtol=0, atol=1e-12):
            raise FieldFormatError("x coordinates inconsistent with mesh header")
    return SolutionField(values, time, mesh, basis, header["equation"], variables)
