/**
 * HUD model: a verbatim copy of the last server state. The client never
 * recomputes engine quantities — rendered angles, progress, and colors
 * are exactly what the server sent, so the operator experiences the
 * tested engine and nothing else.
 */

import { ButtonColor, StateMessage } from "./protocol.js";

export interface HudModel {
  fixedCrosshairDeg: 0;
  movingCrosshairDeg: number;
  crosshairVisible: boolean;
  red: boolean;
  dwellFill: number;
  dwellVisible: boolean;
  continuousValue: number;
  gazeTarget: number | null;
  expectedButton: number | null;
  buttons: Record<string, ButtonColor>;
}

export const NEUTRAL_HUD: HudModel = {
  fixedCrosshairDeg: 0,
  movingCrosshairDeg: 0,
  crosshairVisible: false,
  red: false,
  dwellFill: 0,
  dwellVisible: false,
  continuousValue: 0,
  gazeTarget: null,
  expectedButton: null,
  buttons: {},
};

export function hudFromState(state: StateMessage): HudModel {
  return {
    fixedCrosshairDeg: 0,
    movingCrosshairDeg: state.indicator_deg,
    crosshairVisible: state.indicator_visible,
    red: state.indicator_red,
    dwellFill: state.dwell_progress,
    dwellVisible: state.dwell_indicator_visible,
    continuousValue: state.continuous_value,
    gazeTarget: state.gaze_target,
    expectedButton: state.expected_button,
    buttons: state.buttons,
  };
}
