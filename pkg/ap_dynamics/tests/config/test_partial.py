from typing import List, Optional

import pytest
from pydantic import BaseModel, ValidationError

from ap_dynamics.config.partial import make_partial_model, merge_overrides


class Inner(BaseModel):
    u0_min: float
    count: int = 500


class Outer(BaseModel):
    f: str = "sqrt1p"
    n_iter: int
    ic: Inner
    tags: Optional[List[str]] = None


def test_make_partial_model():
    class TestModel(BaseModel):
        field1: int
        field2: str

    PartialTestModel = make_partial_model(TestModel)

    assert PartialTestModel.model_fields["field1"].default is None
    assert PartialTestModel.model_fields["field2"].default is None
    assert PartialTestModel.model_fields["field1"].annotation == Optional[int]
    assert PartialTestModel.model_fields["field2"].annotation == Optional[str]


def test_partial_model_drops_defaults():
    PartialOuter = make_partial_model(Outer)

    assert PartialOuter.model_fields["f"].default is None
    assert PartialOuter.model_fields["ic"].annotation == Optional[Inner]
    assert PartialOuter().model_dump(exclude_none=True) == {}


def test_partial_model_forbids_unknown_keys():
    with pytest.raises(ValidationError):
        make_partial_model(Outer).model_validate({"n_itr": 3})


def test_empty_model():
    class EmptyModel(BaseModel):
        pass

    assert len(make_partial_model(EmptyModel).model_fields) == 0


def test_merge_overrides_nested():
    base = Outer(n_iter=300, ic=Inner(u0_min=-4.0))
    merged = merge_overrides(base, {"n_iter": 10, "ic": {"count": 5, "u0_min": None}})

    assert merged.n_iter == 10
    assert merged.ic == Inner(u0_min=-4.0, count=5)
    assert base.n_iter == 300


def test_merge_overrides_from_partial_model():
    base = Outer(n_iter=300, ic=Inner(u0_min=-4.0))
    partial = make_partial_model(Outer)(f="abs")

    assert merge_overrides(base, partial).f == "abs"
    assert merge_overrides(base, None) is base


def test_merge_overrides_validates():
    base = Outer(n_iter=300, ic=Inner(u0_min=-4.0))
    with pytest.raises(ValidationError):
        merge_overrides(base, {"n_iter": "many"})
