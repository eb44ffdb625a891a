"""Catalog of nilpotent singularities in Takens form d(y^2 + x^n) + x^p U(x) dy.

The cases are keyed by (n, p): 1a/1b for n < 2p (n odd/even), 2 for
n = 2p (sub-case 2a/2b read off the reduction), 3 for n > 2p.  Components of
the exceptional divisor are numbered in order of creation, D1, D2, ...

Naming of observed quantities:

    CS(Da, Da^Db)   CS index along Da at the corner Da n Db
    CS(Da, p')      CS index along Da at a point off the other components
    BB(p')          Baum-Bott index of the strict transform at p'
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from gmpy2 import mpq

from .blowup import InapplicableLaw, ReductionTree, reduce_singularity
from .exactalg import AlgebraicScalar, MultiPoly, fmt_scalar
from .foliation import AffineOneForm
from .localsing import bb_grothendieck, cs_along_axis, milnor_number

GENS = ("x", "y")


class NilcatError(ValueError):
    pass


@dataclass(frozen=True)
class TakensSpec:
    n: int
    p: int
    U: tuple = (1,)  # coefficients of U(x), constant first

    def __post_init__(self):
        if self.n < 3 or self.p < 2:
            raise NilcatError("Takens form needs n >= 3 and p >= 2")
        U = tuple(mpq(c) for c in self.U)
        while len(U) > 1 and not U[-1]:
            U = U[:-1]
        object.__setattr__(self, "U", U)
        if not U or not U[0]:
            raise NilcatError("U(0) must be nonzero")

    @property
    def U_text(self) -> str:
        return str(MultiPoly.from_univariate_list(GENS, "x", list(self.U)))

    def __str__(self):
        return f"(n={self.n}, p={self.p}, U={self.U_text})"


def takens_form(spec: TakensSpec) -> AffineOneForm:
    """n x^(n-1) dx + (2y + x^p U(x)) dy."""
    x = MultiPoly.var(GENS, "x")
    y = MultiPoly.var(GENS, "y")
    U = MultiPoly.from_univariate_list(GENS, "x", list(spec.U))
    return AffineOneForm(x ** (spec.n - 1) * spec.n, y * 2 + x**spec.p * U)


def case_of(n: int, p: int):
    """Case id from (n, p); n = 2p gives "2" until the reduction decides."""
    if n < 2 * p:
        return ("1a", (n - 1) // 2) if n % 2 else ("1b", n // 2)
    if n == 2 * p:
        return ("2", p)
    return ("3", p)


def nilpotent_case(spec: TakensSpec, tree: ReductionTree | None = None):
    """(case id, k); at n = 2p the sub-case is read off the reduction."""
    case, k = case_of(spec.n, spec.p)
    if case != "2":
        return case, k
    tree = tree or reduce_singularity(takens_form(spec))
    return _observed_subcase(tree, k), k


def _off_corner_points(tree: ReductionTree, comp: int):
    """Nodes on component ``comp`` created by its own blow-up, minus corners."""
    center = tree.nodes[tree.components[comp].center]
    out = []
    for cid in center.children:
        node = tree.nodes[cid]
        others = [c for c in (node.on_x0, node.on_y0) if c is not None and c != comp]
        if not others:
            out.append(node)
    return out


def _observed_subcase(tree: ReductionTree, k: int) -> str:
    pts = _off_corner_points(tree, k)
    if len(pts) == 1 and pts[0].is_leaf and pts[0].classification.kind == "SaddleNode":
        return "2b"
    return "2a"


# ------------------------------------------------------------- expectations
@dataclass
class CaseTable:
    case: str
    n: int
    p: int
    k: int
    expected: dict = dc_field(default_factory=dict)
    notes: list = dc_field(default_factory=list)

    def text(self) -> str:
        lines = [f"case {self.case}, n={self.n}, p={self.p}, k={self.k}"]
        lines += [f"  {key} = {fmt_scalar(v)}" for key, v in self.expected.items()]
        lines += [f"  note: {n}" for n in self.notes]
        return "\n".join(lines)


def expected_index_table(case: str, n: int, p: int, lam_prod=None, mu=None) -> CaseTable:
    """Expected values for one instance.

    ``lam_prod`` (the product of the two CS indices along D_k) is required for
    case 2a; ``mu`` (Milnor number of the saddle-node leaf) for case 3.
    """
    base, k = case_of(n, p)
    if base != case[0] and base != case:
        raise NilcatError(f"(n, p) = ({n}, {p}) is case {base}, not {case}")
    t = CaseTable(case, n, p, k)
    e = t.expected
    e["mu(F,0)"] = n - 1
    for j in range(1, k):
        e[f"CS(D{j + 1}, D{j + 1}^D{j})"] = mpq(-j, j + 1)
    if case == "1a":
        e[f"CS(D{k}, D{k}^D{k + 2})"] = mpq(-(2 * k + 1), k)
        e[f"CS(D{k + 2}, D{k + 2}^D{k + 1})"] = mpq(-1, 2)
        e[f"CS(D{k + 2}, p')"] = mpq(-1, 4 * k + 2)
        e["CS(S~',p')"] = -(4 * k + 2)
        e["CS(F,S',0)"] = 0
        e["BB(F,0)"] = 0
        t.notes.append(
            f"the value -(2k+1)/k is the index along D{k} at D{k} n D{k + 2}; "
            f"along D{k + 2} it is the reciprocal"
        )
    elif case == "1b":
        e[f"CS(D{k}, p')"] = mpq(-1, 2 * k)
        e[f"CS(D{k}, p'')"] = mpq(-1, 2 * k)
        for j in range(1, k):
            e[f"BB(p{j})"] = mpq(1, j + 1) - mpq(1, j)
        e["BB(p')"] = e["BB(p'')"] = -2 * k - mpq(1, 2 * k) + 2
        e["sum nu^2"] = 4 * k - 3
        e["BB(F,0)"] = 0
    elif case == "2a":
        if lam_prod is None:
            raise NilcatError("case 2a needs the observed product lambda' lambda''")
        e["lambda'+lambda''"] = mpq(-1, k)
        for j in range(1, k):
            e[f"BB(p{j})"] = mpq(1, j + 1) - mpq(1, j)
        e["sum nu^2"] = 4 * k - 3
        e["BB(F,0)"] = 2 * n - mpq(2) / (n * lam_prod)
        e["GSV(F,S',0)"] = mpq(n, 2)
    elif case == "2b":
        e["mu(p')"] = 2
        e[f"CS(D{k}, p')"] = mpq(-1, k)
        e["BB(p')"] = 4 - mpq(1, k)
        e["weak separatrix in divisor"] = 1
        e["sum nu^2"] = 4 * k - 3
        e["BB(F,0)"] = 2 * n
    elif case == "3":
        e[f"CS(D{k}, p')"] = mpq(-1, k)
        e[f"CS(D{k}, p'')"] = 0
        e["strong separatrix in divisor"] = 1
        e["CS(F,S',0)"] = 0
        e["GSV(F,S',0)"] = k
        if mu is not None:
            e["GSV(F,S'',0)"] = mu + k - 1
            e["n - (mu+2k-1)"] = 0
    else:
        raise NilcatError(f"unknown case {case}")
    return t


# ---------------------------------------------------------------- verify
@dataclass
class NilReport:
    spec: TakensSpec
    case: str
    k: int
    table: CaseTable
    observed: dict
    mismatches: list
    notes: list
    tree: ReductionTree = dc_field(repr=False)

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def text(self) -> str:
        lines = [f"{self.spec}: case {self.case}, k = {self.k}"]
        for key, exp in self.table.expected.items():
            obs = self.observed.get(key, "missing")
            mark = "ok" if key not in dict(self.mismatches) else "MISMATCH"
            lines.append(f"  {key}: expected {fmt_scalar(exp)}, observed {fmt_scalar(obs) if obs != 'missing' else obs} [{mark}]")
        lines += [f"  note: {n}" for n in self.notes + self.table.notes]
        return "\n".join(lines)

    def row(self) -> dict:
        return {
            "n": self.spec.n,
            "p": self.spec.p,
            "U": self.spec.U_text,
            "case": self.case,
            "k": self.k,
            "ok": self.ok,
            "mismatches": [k for k, _ in self.mismatches],
            "notes": list(self.notes),
        }


def _rat(v):
    if isinstance(v, AlgebraicScalar) and v.is_rational():
        return v.to_rational()
    return v


def _corner_cs(tree: ReductionTree, a: int, b: int):
    """CS along Da at the corner Da n Db, read from a leaf or a center."""
    for node in tree.nodes:
        if {node.on_x0, node.on_y0} == {a, b}:
            if node.is_leaf:
                return node.report.cs_divisor.get(a)
            return _rat(cs_along_axis(node.form, "y" if node.on_x0 == a else "x"))
    return None


def _cs_on(node, comp):
    if node.is_leaf:
        return node.report.cs_divisor.get(comp)
    return _rat(cs_along_axis(node.form, "y" if node.on_x0 == comp else "x"))


def verify_nilpotent(spec: TakensSpec, tree: ReductionTree | None = None) -> NilReport:
    """Reduce the Takens form and compare against the expected table."""
    om = takens_form(spec)
    tree = tree or reduce_singularity(om)
    case, k = nilpotent_case(spec, tree)
    obs = {}
    notes = []
    obs["mu(F,0)"] = milnor_number(om)
    for j in range(1, k):
        obs[f"CS(D{j + 1}, D{j + 1}^D{j})"] = _corner_cs(tree, j + 1, j)
    bb_root = _rat(bb_grothendieck(om))
    try:
        bb_fold = tree.bb()
    except InapplicableLaw as exc:
        bb_fold = None
        notes.append(f"Baum-Bott fold skipped: {exc}")
    if bb_fold is not None and bb_fold != bb_root:
        notes.append(f"Baum-Bott fold {fmt_scalar(bb_fold)} differs from the residue {fmt_scalar(bb_root)}")
    obs["BB(F,0)"] = bb_fold if bb_fold is not None else bb_root
    # centers on the main chain: the first k blow-ups
    chain = [tree.nodes[tree.components[c].center] for c in range(1, k + 1) if c in tree.components]
    obs["sum nu^2"] = sum(c.nu**2 for c in chain)
    for j in range(1, k):
        node = next((nd for nd in tree.nodes if {nd.on_x0, nd.on_y0} == {j, j + 1}), None)
        if node is not None and node.is_leaf:
            obs[f"BB(p{j})"] = node.report.bb
    free = {(leaf.id, role): tree.separatrix_indices(leaf, role) for leaf, role in tree.free_separatrices()}
    mu_sn = None
    if case == "1a":
        m = k + 2
        obs[f"CS(D{k}, D{k}^D{k + 2})"] = _corner_cs(tree, k, m)
        obs[f"CS(D{m}, D{m}^D{k + 1})"] = _corner_cs(tree, m, k + 1)
        pts = _off_corner_points(tree, m) if m in tree.components else []
        if len(pts) == 1:
            obs[f"CS(D{m}, p')"] = _cs_on(pts[0], m)
            sep = [s for s in pts[0].report.separatrices if s.component is None]
            if sep:
                obs["CS(S~',p')"] = sep[0].cs
                obs["CS(F,S',0)"] = free[(pts[0].id, sep[0].role)]["cs"]
        else:
            notes.append(f"expected one point on D{m} off the corners, found {len(pts)}")
    elif case == "1b":
        pts = _off_corner_points(tree, k)
        vals = sorted((_cs_on(nd, k) for nd in pts), key=str)
        for key, v in zip(("CS(D%d, p')" % k, "CS(D%d, p'')" % k), vals):
            obs[key] = v
        bbs = [nd.report.bb for nd in pts if nd.is_leaf]
        for key, v in zip(("BB(p')", "BB(p'')"), bbs):
            obs[key] = v
    elif case == "2a":
        pts = _off_corner_points(tree, k)
        lams = [_cs_on(nd, k) for nd in pts]
        if len(lams) == 2:
            obs["lambda'+lambda''"] = _rat(lams[0] + lams[1])
            lam_prod = _rat(lams[0] * lams[1])
            notes.append(f"lambda' lambda'' = {fmt_scalar(lam_prod)}")
            reduced = [nd for nd in pts if nd.is_leaf]
            if len(reduced) < 2:
                notes.append("one point on D%d is not reduced; further blow-ups were needed" % k)
            if any(c.dicritical for c in tree.components.values()):
                notes.append("the extra blow-ups end in a dicritical component")
            if any(nd.is_leaf and nd.classification.kind == "SaddleNode" for nd in tree.leaves()):
                notes.append("the extra blow-ups end with a saddle-node")
            gsvs = []
            for nd in reduced:
                for s in nd.report.separatrices:
                    if s.component is None:
                        gsvs.append(free[(nd.id, s.role)])
            if gsvs:
                obs["GSV(F,S',0)"] = gsvs[0]["gsv"]
                for g in gsvs:
                    if g["gsv"] != g["gsv_direct"]:
                        notes.append("GSV fold and direct pullback disagree")
                if len(gsvs) > 1:
                    obs["GSV(F,S'',0)"] = gsvs[1]["gsv"]
        else:
            lam_prod = None
            notes.append(f"expected two points on D{k} off the corners, found {len(lams)}")
        obs["_lam_prod"] = lam_prod
    elif case == "2b":
        pts = _off_corner_points(tree, k)
        nd = pts[0]
        obs["mu(p')"] = nd.report.mu
        obs[f"CS(D{k}, p')"] = _cs_on(nd, k)
        obs["BB(p')"] = nd.report.bb
        weak = next(s for s in nd.report.separatrices if s.role == "weak")
        obs["weak separatrix in divisor"] = int(weak.component == k)
    elif case == "3":
        pts = _off_corner_points(tree, k)
        nd_nd = [nd for nd in pts if nd.is_leaf and nd.classification.kind == "NonDegenerate"]
        nd_sn = [nd for nd in pts if nd.is_leaf and nd.classification.kind == "SaddleNode"]
        if len(nd_nd) == 1 and len(nd_sn) == 1:
            a, b = nd_nd[0], nd_sn[0]
            obs[f"CS(D{k}, p')"] = _cs_on(a, k)
            obs[f"CS(D{k}, p'')"] = _cs_on(b, k)
            strong = next(s for s in b.report.separatrices if s.role == "strong")
            obs["strong separatrix in divisor"] = int(strong.component == k)
            sa = next(s for s in a.report.separatrices if s.component is None)
            fa = free[(a.id, sa.role)]
            obs["CS(F,S',0)"] = fa["cs"]
            obs["GSV(F,S',0)"] = fa["gsv"]
            weak = next(s for s in b.report.separatrices if s.role == "weak")
            if weak.component is None:
                obs["GSV(F,S'',0)"] = free[(b.id, "weak")]["gsv"]
            mu_sn = b.report.mu
            obs["n - (mu+2k-1)"] = spec.n - (mu_sn + 2 * k - 1)
            notes.append(f"saddle-node Milnor number {mu_sn}")
        else:
            notes.append("expected one non-degenerate point and one saddle-node on D%d" % k)
    lam_prod = obs.pop("_lam_prod", None)
    if case == "2a" and lam_prod is None:
        table = expected_index_table("2a", spec.n, spec.p, lam_prod=mpq(1))
        table.expected.pop("BB(F,0)")
    else:
        table = expected_index_table(case, spec.n, spec.p, lam_prod=lam_prod, mu=mu_sn)
    if tree.components and not any(c.dicritical for c in tree.components.values()):
        mu_fold = tree.mu()
        if mu_fold != obs["mu(F,0)"]:
            notes.append(f"Milnor fold {mu_fold} differs from the direct value {obs['mu(F,0)']}")
    mismatches = []
    for key, exp in table.expected.items():
        got = obs.get(key)
        if got is None or _rat(got) != exp:
            mismatches.append((key, got))
    return NilReport(spec, case, k, table, obs, mismatches, notes, tree)


# ------------------------------------------------------------------ grid
DEFAULT_US = ((1,), (1, 1), (2, 0, -1))
EXTRA_2B = ((4, 2, (4,)), (4, 2, (4, 1)), (6, 3, (4,)), (6, 3, (-4, 1)), (8, 4, (4,)))


def grid_specs(ns=range(3, 11), ps=range(2, 6), Us=DEFAULT_US, extras=True):
    specs = [TakensSpec(n, p, U) for n in ns for p in ps for U in Us]
    if extras:
        specs += [TakensSpec(n, p, U) for n, p, U in EXTRA_2B]
    return specs


def run_grid(specs=None, stop_on_error=False):
    """Verify every spec; returns the list of NilReport."""
    out = []
    for spec in specs or grid_specs():
        out.append(verify_nilpotent(spec))
        if stop_on_error and not out[-1].ok:
            break
    return out


def grid_text(reports) -> str:
    lines = [f"{'n':>3} {'p':>3} {'U':<10} {'case':<4} {'k':>2}  result"]
    for r in reports:
        status = "ok" if r.ok else "MISMATCH " + ", ".join(k for k, _ in r.mismatches)
        lines.append(f"{r.spec.n:>3} {r.spec.p:>3} {r.spec.U_text:<10} {r.case:<4} {r.k:>2}  {status}")
    return "\n".join(lines)
