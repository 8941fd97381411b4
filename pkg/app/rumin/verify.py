"""
Structural verification of a Rumin complex

Every check is an exact identity over QQ after PBW normalization; a failed
check names the offending degree or entries.
"""
import logging
from typing import List, Optional

from app.core.linalg import penrose_defects, rank, to_fraction
from app.lie.frame import left_invariant_frame
from app.opalg.operators import check_weight_bookkeeping, identity_operator, op_compose
from app.rumin.complex import RuminComplex
from app.schemas.report import CheckResult, VerificationReport

logger = logging.getLogger(__name__)


def _result(name: str, offending: List[str], detail: str = "") -> CheckResult:
    return CheckResult(name=name, passed=not offending, detail=detail, offending=offending)


def _check_dc_squared(rc: RuminComplex) -> CheckResult:
    bad = []
    for k in range(rc.n - 1):
        product = op_compose(rc.dc[k + 1], rc.dc[k])
        if not product.is_zero():
            bad.append(f"d_c^{k + 1} d_c^{k}: {len(product.entries)} nonzero entries")
    return _result("dc_squared", bad)


def _check_d_squared(rc: RuminComplex) -> CheckResult:
    bad = [
        f"d^{k + 1} d^{k}"
        for k in range(rc.n - 1)
        if not op_compose(rc.d[k + 1], rc.d[k]).is_zero()
    ]
    return _result("d_squared", bad)


def _check_d0_squared(rc: RuminComplex) -> CheckResult:
    bad = []
    for k in range(rc.n - 1):
        product = rc.d0[k + 1] * rc.d0[k]
        if any(v != 0 for v in product):
            bad.append(f"d0^{k + 1} d0^{k}")
    return _result("d0_squared", bad)


def _check_weight_homogeneity(rc: RuminComplex) -> CheckResult:
    bad = []
    for k, block in enumerate(rc.dc):
        for (r, c) in check_weight_bookkeeping(block):
            bad.append(f"d_c^{k}[{r}, {c}]")
    for k, projector in enumerate(rc.projection.projectors):
        for (r, c) in check_weight_bookkeeping(projector):
            bad.append(f"Π_E^{k}[{r}, {c}]")
    return _result("weight_homogeneity", bad)


def _check_order_table(rc: RuminComplex) -> CheckResult:
    """Each d_c block's weight jumps are exactly its E0 weight differences"""
    bad = []
    for k, block in enumerate(rc.dc):
        for (r, c), value in block.entries.items():
            expected = rc.e0_weights[k + 1][r] - rc.e0_weights[k][c]
            if value.weights() != [expected]:
                bad.append(f"d_c^{k}[{r}, {c}] has weights {value.weights()}, expected {expected}")
    orders = "; ".join(f"{k}: {rc.dc_orders(k)}" for k in range(rc.n))
    return _result("order_table", bad, detail=orders)


def _check_delta_bound(rc: RuminComplex) -> CheckResult:
    if rc.n < 2:
        return CheckResult(
            name="delta_bound",
            passed=None,
            detail=f"out of hypothesis: dim {rc.n} < 2 (delta = {rc.delta}, Q - 1 = {rc.Q - 1})",
        )
    ok = rc.delta is not None and rc.delta <= rc.Q - 1
    return CheckResult(
        name="delta_bound",
        passed=ok,
        detail=f"delta = {rc.delta}, Q - 1 = {rc.Q - 1}",
        offending=[] if ok else [f"delta {rc.delta} > {rc.Q - 1}"],
    )


def _check_euler(rc: RuminComplex) -> CheckResult:
    if rc.n < 1:
        return CheckResult(name="euler_characteristic", passed=None, detail="dimension 0")
    chi = sum((-1) ** k * rc.dim(k) for k in range(rc.n + 1))
    return _result("euler_characteristic", [] if chi == 0 else [f"chi = {chi}"], detail=f"chi = {chi}")


def _check_betti(rc: RuminComplex) -> CheckResult:
    bad = []
    for k in range(rc.n + 1):
        kernel = rc.basis.dim(k) - (rank(rc.d0[k]) if k < rc.n else 0)
        image = rank(rc.d0[k - 1]) if k >= 1 else 0
        if rc.dim(k) != kernel - image:
            bad.append(f"degree {k}: dim E0 = {rc.dim(k)}, Betti = {kernel - image}")
    return _result("betti_dimensions", bad)


def _check_penrose(rc: RuminComplex) -> CheckResult:
    bad = []
    for k, (d0, pinv) in enumerate(zip(rc.d0, rc.d0_pinv)):
        bad.extend(f"degree {k}: {name}" for name in penrose_defects(d0, pinv))
    return _result("penrose", bad)


def _check_projector_idempotent(rc: RuminComplex) -> CheckResult:
    bad = [
        f"Π_E^{k}"
        for k, projector in enumerate(rc.projection.projectors)
        if op_compose(projector, projector) != projector
    ]
    return _result("projector_idempotent", bad)


def _check_projector_chain_map(rc: RuminComplex) -> CheckResult:
    projectors = rc.projection.projectors
    bad = [
        f"degree {k}"
        for k in range(rc.n)
        if op_compose(rc.d[k], projectors[k]) != op_compose(projectors[k + 1], rc.d[k])
    ]
    return _result("projector_chain_map", bad)


def _check_homotopy(rc: RuminComplex) -> CheckResult:
    """1 - Π_k = A_(k+1) d_k + d_(k-1) A_k"""
    projectors = rc.projection.projectors
    homotopy = rc.projection.homotopy
    bad = []
    for k in range(rc.n + 1):
        lhs = identity_operator(rc.ring, projectors[k].row_weights) - projectors[k]
        rhs = None
        if k < rc.n:
            rhs = op_compose(homotopy[k + 1], rc.d[k])
        if k >= 1:
            term = op_compose(rc.d[k - 1], homotopy[k])
            rhs = term if rhs is None else rhs + term
        if rhs is None:
            if not lhs.is_zero():
                bad.append(f"degree {k}")
        elif lhs != rhs:
            bad.append(f"degree {k}")
    return _result("homotopy_identity", bad)


def _check_abelian(rc: RuminComplex) -> CheckResult:
    if rc.algebra.step != 1:
        return CheckResult(name="abelian_degeneration", passed=None, detail="algebra is not abelian")
    bad = [f"degree {k}" for k in range(rc.n) if rc.dc[k] != rc.d[k]]
    return _result("abelian_degeneration", bad)


def _check_horizontal_gradient(rc: RuminComplex) -> CheckResult:
    """d_c on functions is f -> (X_i f) over the first layer"""
    if rc.n < 1:
        return CheckResult(name="horizontal_gradient", passed=None, detail="dimension 0")
    bad = []
    first_layer = rc.algebra.layer_indices(1)
    coordinates = rc.e0_coordinates[1]
    for r in range(coordinates.rows):
        support = [i for i in range(coordinates.cols) if coordinates[r, i] != 0]
        expected = rc.ring.zero()
        for i in support:
            expected = expected + rc.ring.generator(i) * to_fraction(coordinates[r, i])
        if any(i not in first_layer for i in support) or rc.dc[0].entry(r, 0) != expected:
            bad.append(f"row {r}")
    return _result("horizontal_gradient", bad)


def _check_frame(rc: RuminComplex) -> CheckResult:
    defects = left_invariant_frame(rc.algebra).bracket_defects()
    return _result("frame_brackets", [f"[X{i + 1}, X{j + 1}]" for i, j in defects])


CHECKS = {
    "dc_squared": _check_dc_squared,
    "d_squared": _check_d_squared,
    "d0_squared": _check_d0_squared,
    "weight_homogeneity": _check_weight_homogeneity,
    "order_table": _check_order_table,
    "delta_bound": _check_delta_bound,
    "euler_characteristic": _check_euler,
    "betti_dimensions": _check_betti,
    "penrose": _check_penrose,
    "projector_idempotent": _check_projector_idempotent,
    "projector_chain_map": _check_projector_chain_map,
    "homotopy_identity": _check_homotopy,
    "abelian_degeneration": _check_abelian,
    "horizontal_gradient": _check_horizontal_gradient,
    "frame_brackets": _check_frame,
}


def verify_complex(rc: RuminComplex, only: Optional[List[str]] = None) -> VerificationReport:
    """
    Run every structural check on a built complex

    Args:
        rc: complex from build_rumin_complex
        only: optional subset of check names

    Returns:
        VerificationReport; passed is False as soon as one check fails.
        Checks outside their hypothesis report passed=None and do not fail.
    """
    results = []
    for name, check in CHECKS.items():
        if only is not None and name not in only:
            continue
        result = check(rc)
        results.append(result)
        if result.passed is False:
            logger.warning("check %s failed for %s: %s", result.name, rc.algebra.name, result.offending)
    passed = all(result.passed is not False for result in results)
    return VerificationReport(
        algebra=rc.algebra.name,
        passed=passed,
        delta=rc.delta,
        Q=rc.Q,
        checks=results,
    )
