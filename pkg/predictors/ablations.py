"""
Single-component predictors used to measure what each half of PARIMA
contributes.
"""

from predictors.base import BasePredictor


class ArimaOnlyPredictor(BasePredictor):
    """The intermediate viewport alone, wrapped into the frame."""

    trains_pa = False

    def get_name(self) -> str:
        return "ARIMA"

    def _predict_frames(self, objects):
        intermediates = self.arima_intermediates()
        return list(intermediates), intermediates, [None] * len(intermediates)


class PaOnlyPredictor(BasePredictor):
    """
    PA regression without ARIMA.

    Each frame's prediction (before wrapping) is the intermediate feature
    of the next frame; the first frame of a chunk starts from the last
    actual viewport of the previous chunk. Errors therefore propagate
    through the chunk. There is no forecast to correct, so the regression
    always runs on raw coordinates.
    """

    def get_name(self) -> str:
        return "PA"

    def _predict_frames(self, objects):
        last = self.session.history[-1]
        inter_x, inter_y = last.x, last.y
        raw, intermediates, contributions = [], [], []
        for objs_x, objs_y in objects:
            px, py, contribution = self._pa_frame(inter_x, inter_y, objs_x, objs_y)
            intermediates.append((inter_x, inter_y))
            raw.append((px, py))
            contributions.append(contribution)
            inter_x, inter_y = px, py
        return raw, intermediates, contributions
