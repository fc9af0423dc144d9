"""reward shaper 백엔드 모듈"""

from vortex.shaper.analytic import AnalyticShaper
from vortex.shaper.base import ShaperBackend, ShaperContext, ShaperOutput, validate_shaping_vector
from vortex.shaper.remote import RemoteShaper, extract_json_object
from vortex.shaper.scripted import ScriptedShaper

__all__ = [
    "ShaperBackend", "ShaperContext", "ShaperOutput", "validate_shaping_vector",
    "AnalyticShaper", "RemoteShaper", "ScriptedShaper", "extract_json_object",
]
