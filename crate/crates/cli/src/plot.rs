//! Static SVG rendering of figure sweeps: bounds in blue, known exact
//! pieces in red.

use std::path::Path;

use anyhow::{anyhow, Result};
use plotters::prelude::*;

use crate::{Row, TGrid};

const Y_MAX: f64 = 17.0;

pub fn render_svg(path: &Path, which: u8, rows: &[Row], n_max: usize, grid: &TGrid) -> Result<()> {
    let root = SVGBackend::new(path, (900, 640)).into_drawing_area();
    root.fill(&WHITE).map_err(|e| anyhow!("{e}"))?;
    let caption = match which {
        1 => "Upper bounds f_n(t), Wirtinger operator, n = 1..6",
        _ => "Upper bounds f_n(t)·max(1,t), twist operator, n = 1..7",
    };
    let mut chart = ChartBuilder::on(&root)
        .caption(caption, ("sans-serif", 20))
        .margin(12)
        .x_label_area_size(36)
        .y_label_area_size(48)
        .build_cartesian_2d(0.0..grid.stop.max(4.0), 0.0..Y_MAX)
        .map_err(|e| anyhow!("{e}"))?;
    chart
        .configure_mesh()
        .x_desc("t")
        .y_desc("bound")
        .draw()
        .map_err(|e| anyhow!("{e}"))?;

    for n in 1..=n_max {
        let shade = 90 + (165 * (n_max - n) / n_max.max(1)) as u8;
        let color = RGBColor(0, 255 - shade, 255);
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.n == n && r.bound.is_finite())
            .filter_map(|r| r.t.map(|t| (t, r.bound.min(Y_MAX))))
            .collect();
        chart
            .draw_series(LineSeries::new(pts, color.stroke_width(1)))
            .map_err(|e| anyhow!("{e}"))?
            .label(format!("n = {n}"))
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 16, y)], color));
    }

    let red = RED.stroke_width(2);
    chart
        .draw_series(LineSeries::new([(0.0, 1.0), (0.38, 1.0)], red))
        .map_err(|e| anyhow!("{e}"))?
        .label("exact")
        .legend(|(x, y)| PathElement::new(vec![(x, y), (x + 16, y)], RED));
    let square: Vec<(f64, f64)> = (0..=100).map(|i| 2.618 + (4.0 - 2.618) * i as f64 / 100.0).map(|t| (t, t * t)).collect();
    chart.draw_series(LineSeries::new(square, red)).map_err(|e| anyhow!("{e}"))?;
    chart
        .draw_series([Circle::new((1.0, 1.113), 4, RED.filled())])
        .map_err(|e| anyhow!("{e}"))?;

    chart
        .configure_series_labels()
        .border_style(BLACK)
        .background_style(WHITE.mix(0.8))
        .draw()
        .map_err(|e| anyhow!("{e}"))?;
    root.present().map_err(|e| anyhow!("{e}"))?;
    Ok(())
}
