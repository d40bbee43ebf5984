from copy import deepcopy
from typing import Any, Mapping, Optional, Tuple, Type, TypeVar

from pydantic import BaseModel, ConfigDict, create_model
from pydantic.fields import FieldInfo


def _optional_field(field: FieldInfo) -> Tuple[Any, FieldInfo]:
    """
    Copy a field so that it accepts None and defaults to None.

    The original default is dropped on purpose: a partial model only records values the
    caller actually supplied, so that `merge_overrides` can tell them apart.

    Args:
        field (FieldInfo): The field to relax.

    Returns:
        Tuple[Any, FieldInfo]: The relaxed annotation and field.
    """
    new = deepcopy(field)
    new.default = None
    new.default_factory = None
    new.annotation = Optional[field.annotation]
    return new.annotation, new


_ModelT = TypeVar("_ModelT", bound=BaseModel)


def make_partial_model(model: Type[_ModelT], model_name: Optional[str] = None) -> Type[BaseModel]:
    """
    Create a model with the same fields as `model`, all optional and defaulting to None.

    Used for command line overrides: flags fill a partial model, which is then merged over
    the configuration read from a preset file.

    Args:
        model (Type[BaseModel]): The configuration model.
        model_name (str, optional): Name of the new model. Defaults to ``Partial<Model>``.

    Returns:
        Type[BaseModel]: The partial model class.
    """
    return create_model(
        f"Partial{model.__name__}" if model_name is None else model_name,
        __config__=ConfigDict(extra="forbid"),
        __module__=model.__module__,
        **{
            field_name: _optional_field(field_info)
            for field_name, field_info in model.model_fields.items()
        }
    )


def merge_overrides(base: _ModelT, overrides: Mapping[str, Any] | BaseModel | None) -> _ModelT:
    """
    Return a validated copy of `base` with every non-None override applied.

    Nested models are merged key by key when the override is a mapping.

    Args:
        base (BaseModel): The resolved configuration.
        overrides (Mapping | BaseModel | None): Partial values, e.g. from command line flags.

    Returns:
        BaseModel: A new instance of the same class as `base`.
    """
    if overrides is None:
        return base
    if isinstance(overrides, BaseModel):
        overrides = overrides.model_dump(exclude_none=True)
    data = base.model_dump()
    for key, value in overrides.items():
        if value is None:
            continue
        if isinstance(value, Mapping) and isinstance(data.get(key), dict):
            data[key] = {**data[key], **{k: v for k, v in value.items() if v is not None}}
        else:
            data[key] = value
    return type(base).model_validate(data)

