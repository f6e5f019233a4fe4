from predictors.base import BasePredictor


class ParimaPredictor(BasePredictor):
    """
    ARIMA forecast fused with object trajectories.

    The per-chunk ARIMA forecast is the intermediate viewport. By default
    the passive-aggressive models then learn its error from the offsets of
    the objects in view, so a perfectly followed object moves the
    prediction onto itself whatever the forecast did. With residual off
    the regression runs on raw (intermediate, object) coordinates.
    """

    def get_name(self) -> str:
        return "PARIMA"

    def fits_residual(self) -> bool:
        return self.session.residual

    def _predict_frames(self, objects):
        intermediates = self.arima_intermediates()
        raw, contributions = [], []
        for (inter_x, inter_y), (objs_x, objs_y) in zip(intermediates, objects):
            px, py, contribution = self._pa_frame(inter_x, inter_y, objs_x, objs_y)
            raw.append((px, py))
            contributions.append(contribution)
        return raw, intermediates, contributions
