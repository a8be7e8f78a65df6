from typing import List, Optional

from pydantic import BaseModel


class ReportBase(BaseModel):
    verified: bool = False
    failed_checks: List[str] = []


class ColtightReport(ReportBase):
    n: int
    t: int
    h_edges: int
    red_count: int
    blue_count: int
    red_equals_h: bool
    red_bipartite: bool
    pattern_free: bool
    min_colour_count: int
    delta: str


class TourtightReport(ReportBase):
    n: int
    t: int
    r: int
    a_size: int
    b_size: int
    h_edges: int
    h_biclique_free: bool
    backward_count: int
    backward_equals_h: bool
    classes_transitive: bool
    reversal_transitive: bool
    pattern_free: bool
    fas_exact: Optional[int] = None
    ordering: List[int] = []


class StarReport(ReportBase):
    n: int
    t: int
    red_count: int
    pattern_free: bool
    delta: str


class D2Level(BaseModel):
    depth: int
    n: int
    u2_free: bool
    strongly_connected: bool
    fas_exact: Optional[int] = None
    log_bound: int
    recursion_bound: Optional[int] = None


class D2Report(ReportBase):
    depth: int
    n: int
    u2_free: bool
    strongly_connected: bool
    fas_exact: Optional[int] = None
    levels: List[D2Level] = []


class PolarityReport(ReportBase):
    q: int
    n: int
    edge_count: int
    expected_edges: int
    c4_free: bool


class ZarankiewiczReport(ReportBase):
    n: int
    a: int
    b: int
    edge_count: int
    exhaustive: bool
    canonical_forms: int
    edges: List[List[int]] = []
