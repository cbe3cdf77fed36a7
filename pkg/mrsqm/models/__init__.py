from mrsqm.models.enums import LabelColumn, SelectionStrategy, TransformType  # noqa: F401
