import json

import numpy as np
import pytest

from finpot import (
    GenParams,
    ast_decompose,
    basis_vector,
    canonical_json,
    paper_example,
    random_finite_potent,
    run_conformance,
    spectrum,
    tate_trace,
    validate,
    zero_operator,
)


def test_gen_params_validation():
    with pytest.raises(ValueError):
        GenParams(seed=1, max_core_dim=9)
    with pytest.raises(ValueError):
        GenParams(seed=1, max_tail_terms=5)
    with pytest.raises(ValueError):
        GenParams(seed=1, magnitude=0.0)


def test_generation_deterministic():
    a = random_finite_potent(GenParams(seed=42))
    b = random_finite_potent(GenParams(seed=42))
    assert canonical_json(a) == canonical_json(b)
    c = random_finite_potent(GenParams(seed=43))
    assert canonical_json(a) != canonical_json(c)


def test_generated_operators_valid():
    for seed in range(10):
        op = random_finite_potent(GenParams(seed=seed))
        validate(op)
        assert op.cutoff >= 1


def test_generator_core_dim_zero_is_nilpotent():
    params = GenParams(seed=5, max_core_dim=0, max_tail_terms=0)
    op = random_finite_potent(params)
    assert tate_trace(op) == pytest.approx(0, abs=1e-10)


def test_generator_diagonal_core_spectrum():
    # no nilpotent block and no tails: spectrum is exactly the core eigenvalues
    params = GenParams(seed=9, max_nilpotent_dim=0, max_tail_terms=0)
    op = random_finite_potent(params)
    ast = ast_decompose(op)
    report = spectrum(op, ast=ast)
    assert report.total_multiplicity == ast.dim_w
    for pair in report.eigenpairs:
        assert abs(pair.value) > 0.3  # eigenvalues stay away from zero


def test_paper_example_fixed_data(example_op):
    assert example_op.cutoff == 4
    assert len(example_op.terms) == 1
    np.testing.assert_allclose(example_op.block[:, 0], [1 + 1j, 1, 0, 1])
    image = example_op.apply(basis_vector(3))
    assert (image - (basis_vector(1) - 2 * basis_vector(2)
                     + 3 * basis_vector(3) - 2 * basis_vector(4))).norm() < 1e-13


def test_run_conformance_example(example_op):
    report = run_conformance(example_op)
    assert report.passed
    assert report.exit_code == 0
    names = [c.name for c in report.checks]
    assert names == [f"T{k}" for k in range(1, 9)]
    t1 = report.checks[0]
    assert t1.details["tate"] == pytest.approx([4.0, 1.0], abs=1e-10)


def test_run_conformance_zero():
    report = run_conformance(zero_operator(2))
    assert report.passed


def test_conformance_report_flags_det_convention(example_op):
    report = run_conformance(example_op)
    note = " ".join(report.notes)
    assert "15+1j" in note.replace(" ", "")
    assert "31-1j" in note.replace(" ", "")


def test_report_deterministic(example_op):
    a = run_conformance(example_op).to_json_obj()
    b = run_conformance(example_op).to_json_obj()
    assert a == b


def test_report_json_serializable(example_op):
    report = run_conformance(example_op)
    text = json.dumps(report.to_json_obj())
    parsed = json.loads(text)
    assert parsed["passed"] is True
    assert len(parsed["checks"]) == 8


def test_random_suite_small_batch():
    for seed in range(6):
        op = random_finite_potent(GenParams(seed=seed))
        report = run_conformance(op)
        assert report.passed, [
            (c.name, c.residual, c.details) for c in report.checks if not c.passed]


def test_scale_covariance_random():
    for seed in (2, 7):
        op = random_finite_potent(GenParams(seed=seed))
        c = 1.5 - 0.5j
        scaled = c * op
        base = tate_trace(op)
        assert tate_trace(scaled) == pytest.approx(c * base, abs=1e-9)
        base_vals = spectrum(op).values
        scaled_vals = spectrum(scaled).values
        for v in scaled_vals:
            assert min(abs(v - c * b) for b in base_vals) < 1e-8
