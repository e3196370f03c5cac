//! Gantt chart rendering to SVG: one lane per machine, one labeled rectangle
//! per operation. Output bytes are a pure function of the schedule.

use std::fmt::Write as _;

use glnsa_core::instance::Instance;
use glnsa_core::schedule::{gantt_rows, Schedule};

const LANE_HEIGHT: f64 = 34.0;
const BAR_HEIGHT: f64 = 24.0;
const MARGIN_LEFT: f64 = 64.0;
const MARGIN_TOP: f64 = 24.0;
const MARGIN_BOTTOM: f64 = 40.0;
const MARGIN_RIGHT: f64 = 24.0;
const PLOT_WIDTH: f64 = 920.0;

const PALETTE: [&str; 16] = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7",
    "#9c755f", "#bab0ac", "#86bcb6", "#d37295", "#fabfd2", "#b6992d", "#499894", "#79706e",
];

/// Renders the schedule as a standalone SVG document.
pub fn gantt_svg(inst: &Instance, sched: &Schedule) -> String {
    let machines = inst.machine_count();
    let height = MARGIN_TOP + machines as f64 * LANE_HEIGHT + MARGIN_BOTTOM;
    let width = MARGIN_LEFT + PLOT_WIDTH + MARGIN_RIGHT;
    let span = sched.makespan.max(1) as f64;
    let scale = PLOT_WIDTH / span;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="11">"##
    );
    let _ = writeln!(svg, r##"<rect width="{width:.0}" height="{height:.0}" fill="white"/>"##);

    // Lanes and labels; a machine without operations still gets its lane.
    for machine in 0..machines {
        let y = MARGIN_TOP + machine as f64 * LANE_HEIGHT;
        let fill = if machine % 2 == 0 { "#f7f7f7" } else { "#efefef" };
        let _ = writeln!(
            svg,
            r##"<rect x="{MARGIN_LEFT:.2}" y="{y:.2}" width="{PLOT_WIDTH:.2}" height="{LANE_HEIGHT:.2}" fill="{fill}"/>"##
        );
        let label_y = y + LANE_HEIGHT / 2.0 + 4.0;
        let _ = writeln!(
            svg,
            r##"<text x="{:.2}" y="{label_y:.2}" text-anchor="end">M{}</text>"##,
            MARGIN_LEFT - 8.0,
            machine + 1
        );
    }

    for (machine, op, start, completion) in gantt_rows(sched, inst) {
        let x = MARGIN_LEFT + start as f64 * scale;
        let w = (completion - start) as f64 * scale;
        let y = MARGIN_TOP + machine as f64 * LANE_HEIGHT + (LANE_HEIGHT - BAR_HEIGHT) / 2.0;
        let color = PALETTE[op.job % PALETTE.len()];
        let _ = writeln!(
            svg,
            r##"<rect x="{x:.2}" y="{y:.2}" width="{w:.2}" height="{BAR_HEIGHT:.2}" fill="{color}" stroke="#333" stroke-width="0.5"><title>O{},{} [{start}, {completion})</title></rect>"##,
            op.job + 1,
            op.step + 1
        );
        let _ = writeln!(
            svg,
            r##"<text x="{:.2}" y="{:.2}" text-anchor="middle" fill="#111">O{},{}</text>"##,
            x + w / 2.0,
            y + BAR_HEIGHT / 2.0 + 4.0,
            op.job + 1,
            op.step + 1
        );
    }

    // Time axis with ten round ticks.
    let axis_y = MARGIN_TOP + machines as f64 * LANE_HEIGHT;
    let _ = writeln!(
        svg,
        r##"<line x1="{MARGIN_LEFT:.2}" y1="{axis_y:.2}" x2="{:.2}" y2="{axis_y:.2}" stroke="#333"/>"##,
        MARGIN_LEFT + PLOT_WIDTH
    );
    let tick_step = ((span / 10.0).ceil() as u64).max(1);
    let mut tick = 0;
    while tick as f64 <= span {
        let x = MARGIN_LEFT + tick as f64 * scale;
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.2}" y1="{axis_y:.2}" x2="{x:.2}" y2="{:.2}" stroke="#333"/>"##,
            axis_y + 4.0
        );
        let _ = writeln!(
            svg,
            r##"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{tick}</text>"##,
            axis_y + 16.0
        );
        tick += tick_step;
    }
    let _ = writeln!(
        svg,
        r##"<text x="{:.2}" y="{:.2}" text-anchor="middle">makespan {}</text>"##,
        MARGIN_LEFT + PLOT_WIDTH / 2.0,
        axis_y + 32.0,
        sched.makespan
    );
    svg.push_str("</svg>\n");
    svg
}
