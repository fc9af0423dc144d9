"""궤적 비교, 언어 피드백, 프롬프트 갱신"""

from vortex.feedback.models import Deltas, PromptState, VerbalFeedback
from vortex.feedback.prompt import build_fixed_prompt, render_prompt, update_prompt
from vortex.feedback.reflection import compare, load_templates, render_feedback

__all__ = [
    "Deltas", "PromptState", "VerbalFeedback",
    "build_fixed_prompt", "render_prompt", "update_prompt",
    "compare", "load_templates", "render_feedback",
]
