import inspect

import pytest

from app.services import errors

ERROR_CLASSES = [
    cls for _, cls in inspect.getmembers(errors, inspect.isclass)
    if issubclass(cls, Exception) and cls.__module__ == errors.__name__
]


@pytest.mark.parametrize("cls", ERROR_CLASSES, ids=lambda cls: cls.__name__)
def test_error_has_one_line_docstring(cls):
    doc = cls.__dict__.get("__doc__")
    assert doc and doc.strip()
    assert "\n" not in doc.strip()


@pytest.mark.parametrize("cls", ERROR_CLASSES, ids=lambda cls: cls.__name__)
def test_error_has_a_single_root(cls):
    roots = (errors.PreconditionError, errors.ConsistencyError)
    assert issubclass(cls, roots)
    assert not (issubclass(cls, errors.PreconditionError) and issubclass(cls, errors.ConsistencyError))


def test_error_roots_keep_builtin_contracts():
    assert issubclass(errors.PreconditionError, ValueError)
    assert issubclass(errors.ConsistencyError, RuntimeError)
