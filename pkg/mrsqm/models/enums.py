import enum


class TransformType(str, enum.Enum):
    SAX = "sax"
    SFA = "sfa"
    BOTH = "both"  # only valid for run configuration, never for a single representation


class SelectionStrategy(str, enum.Enum):
    R = "r"    # random sampling of subwords
    S = "s"    # Chi2 branch-and-bound
    RS = "rs"  # random pool filtered by Chi2
    SR = "sr"  # Chi2 pool filtered by random sampling


class LabelColumn(str, enum.Enum):
    FIRST = "first"
    LAST = "last"
