"""파레토 필터와 아카이브

점 (U, C): U 는 클수록, C 는 작을수록 좋습니다.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple

Point = Tuple[float, float]


def dominates(q: Point, p: Point) -> bool:
    """q 가 p 를 지배하면 True (U_q >= U_p, C_q <= C_p, 하나는 엄격)"""
    return q[0] >= p[0] and q[1] <= p[1] and (q[0] > p[0] or q[1] < p[1])


def _dominated_mask(points: Sequence[Point]) -> List[bool]:
    return [any(dominates(q, p) for q in points) for p in points]


def pareto_filter(points: Iterable[Point]) -> List[Point]:
    """지배되지 않는 점만 남김 (같은 점은 한 번, 입력 순서 유지)"""
    pts = [(float(u), float(c)) for u, c in points]
    mask = _dominated_mask(pts)
    seen = set()
    result: List[Point] = []
    for p, dominated in zip(pts, mask):
        if not dominated and p not in seen:
            seen.add(p)
            result.append(p)
    return result


@dataclass(frozen=True)
class ParetoPoint:
    """아카이브 점"""
    U: float
    C: float
    tag: str
    shaping_id: Optional[str] = None

    @property
    def point(self) -> Point:
        return (self.U, self.C)


@dataclass
class ParetoArchive:
    """(U, C) 점 모음. 필터 전 점은 에피소드/실행과 일대일로 대응합니다."""
    points: List[ParetoPoint] = field(default_factory=list)

    def add(self, U: float, C: float, tag: str, shaping_id: Optional[str] = None) -> ParetoPoint:
        p = ParetoPoint(U=float(U), C=float(C), tag=str(tag), shaping_id=shaping_id)
        self.points.append(p)
        return p

    def extend(self, other: "ParetoArchive") -> None:
        self.points.extend(other.points)

    def dominated_flags(self) -> List[bool]:
        """점별 지배 여부 (pareto.csv 의 dominated 열)"""
        return _dominated_mask([p.point for p in self.points])

    def frontier(self) -> List[ParetoPoint]:
        """지배되지 않는 점 (같은 (U, C) 는 처음 것 하나)"""
        seen = set()
        result = []
        for p, dominated in zip(self.points, self.dominated_flags()):
            if not dominated and p.point not in seen:
                seen.add(p.point)
                result.append(p)
        return result

    def __len__(self) -> int:
        return len(self.points)
