"""
分析物编码与混合物标签

六种分析物固定顺序 B < T < E < X < N < I，标签字符串按该顺序拼接，
空集合写作 "NONE"。parse(format(s)) 与 format(parse(s)) 都是恒等映射。
"""

from dataclasses import dataclass
from enum import Enum
from typing import FrozenSet, Iterable, Tuple, Union


class AnalyteCode(str, Enum):
    """分析物编码"""
    B = "B"   # 苯
    T = "T"   # 甲苯
    E = "E"   # 乙苯
    X = "X"   # 对二甲苯
    N = "N"   # 萘
    I = "I"   # 干扰物

    @property
    def order(self) -> int:
        return ANALYTE_ORDER.index(self)


ANALYTE_ORDER: Tuple[AnalyteCode, ...] = (
    AnalyteCode.B, AnalyteCode.T, AnalyteCode.E, AnalyteCode.X, AnalyteCode.N, AnalyteCode.I,
)

EMPTY_LABEL = "NONE"


@dataclass(frozen=True)
class MixtureLabel:
    """混合物标签：存在的分析物集合"""
    present: FrozenSet[AnalyteCode]

    @classmethod
    def of(cls, codes: Iterable[Union[str, AnalyteCode]]) -> "MixtureLabel":
        return cls(frozenset(AnalyteCode(c) for c in codes))

    @classmethod
    def parse(cls, text: Union[str, "MixtureLabel"]) -> "MixtureLabel":
        """
        解析标签字符串。

        必须是规范形式（按 B,T,E,X,N,I 顺序、无重复），否则抛 ValueError。
        """
        if isinstance(text, MixtureLabel):
            return text
        text = text.strip()
        if text == EMPTY_LABEL:
            return cls(frozenset())
        if not text:
            raise ValueError("empty label string; use 'NONE' for the empty mixture")
        try:
            codes = [AnalyteCode(ch) for ch in text]
        except ValueError as e:
            raise ValueError(f"unknown analyte code in label {text!r}") from e
        label = cls(frozenset(codes))
        if label.canonical != text:
            raise ValueError(f"label {text!r} is not canonical, expected {label.canonical!r}")
        return label

    @property
    def ordered(self) -> Tuple[AnalyteCode, ...]:
        return tuple(code for code in ANALYTE_ORDER if code in self.present)

    @property
    def canonical(self) -> str:
        if not self.present:
            return EMPTY_LABEL
        return "".join(code.value for code in self.ordered)

    def __str__(self) -> str:
        return self.canonical

    def __lt__(self, other: "MixtureLabel") -> bool:
        return self.canonical < other.canonical


def label_text(label: Union[str, MixtureLabel]) -> str:
    """MixtureLabel 或普通字符串统一转成字符串"""
    return label.canonical if isinstance(label, MixtureLabel) else str(label)
