"""Three-valued verdicts with replayable witnesses and certificates."""

from __future__ import annotations

SCHEMA = "lipsat.verdict/1"

YES = "CertifiedYes"
NO = "CertifiedNo"
OPEN = "NoObstructionUpToBound"

_PRIORITY = {NO: 0, YES: 1, OPEN: 2}


def _jsonable(obj):
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    if hasattr(obj, "to_json"):
        return obj.to_json()
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return str(obj)


class Verdict:
    """``kind`` is one of CertifiedYes, CertifiedNo, NoObstructionUpToBound."""

    def __init__(self, kind, witness=None, certificate=None, bound=None, details=None):
        if kind not in _PRIORITY:
            raise ValueError(f"unknown verdict kind {kind!r}")
        self.kind = kind
        self.witness = witness
        self.certificate = certificate
        self.bound = bound
        self.details = dict(details or {})

    @property
    def is_yes(self) -> bool:
        return self.kind == YES

    @property
    def is_no(self) -> bool:
        return self.kind == NO

    @property
    def is_open(self) -> bool:
        return self.kind == OPEN

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "kind": self.kind,
            "witness": _jsonable(self.witness),
            "certificate": _jsonable(self.certificate),
            "bound": _jsonable(self.bound),
            "details": _jsonable(self.details),
        }

    def summary(self) -> str:
        if self.is_no and self.witness is not None and hasattr(self.witness, "summary"):
            return f"{self.kind}: {self.witness.summary()}"
        if self.is_open and self.bound is not None:
            return f"{self.kind}: {self.bound}"
        if self.is_yes and self.certificate is not None and hasattr(self.certificate, "summary"):
            return f"{self.kind}: {self.certificate.summary()}"
        return self.kind

    def __str__(self):
        return self.summary()

    def __repr__(self):
        return f"Verdict({self.kind})"


def merge(verdicts):
    """Conjunction: any No wins, then any open result, else Yes."""
    verdicts = list(verdicts)
    for v in verdicts:
        if v.is_no:
            return v
    for v in verdicts:
        if v.is_open:
            return v
    return verdicts[0] if verdicts else Verdict(YES)


def strongest(verdicts):
    """Search merge: first No in enumeration order, then first Yes, else the first open one."""
    verdicts = list(verdicts)
    return min(enumerate(verdicts), key=lambda iv: (_PRIORITY[iv[1].kind], iv[0]))[1]
