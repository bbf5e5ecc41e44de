use std::fmt::Write as _;

use super::{BenchReport, Category};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chart {
    SuccessRate,
    Latency,
}

/// Fixed-width text table, one row per strategy and category.
pub fn render_table(report: &BenchReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<10} {:<20} {:>4} {:>7} {:>7} {:>9} {:>9}",
        "strategy", "category", "M", "S", "S sd", "T (s)", "T sd"
    );
    for g in &report.groups {
        let _ = writeln!(
            out,
            "{:<10} {:<20} {:>4} {:>7.3} {:>7.3} {:>9.3} {:>9.3}",
            g.strategy.as_str(),
            g.category.label(),
            g.m,
            g.success_rate,
            g.success_std,
            g.mean_latency_s,
            g.latency_std
        );
    }
    for o in &report.overall {
        let _ = writeln!(
            out,
            "{:<10} {:<20} {:>4} {:>7.3} {:>7} {:>9.3} {:>9}",
            o.strategy.as_str(),
            "overall",
            o.m,
            o.success_rate,
            "",
            o.mean_latency_s,
            ""
        );
    }
    out
}

const COLORS: [&str; 3] = ["#1f77b4", "#ff7f0e", "#2ca02c"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Grouped bar chart: categories along x, one bar per strategy, and a dashed
/// line at each strategy's overall mean.
pub fn render_svg(report: &BenchReport, chart: Chart) -> String {
    let (width, height) = (760.0, 380.0);
    let (left, right, top, bottom) = (60.0, 150.0, 30.0, 50.0);
    let plot_w = width - left - right;
    let plot_h = height - top - bottom;
    let strategies: Vec<_> = report.overall.iter().map(|o| o.strategy).collect();
    let categories: Vec<Category> = Category::ALL
        .into_iter()
        .filter(|c| report.groups.iter().any(|g| g.category == *c))
        .collect();
    let value = |g: &super::GroupStats| match chart {
        Chart::SuccessRate => g.success_rate,
        Chart::Latency => g.mean_latency_s,
    };
    let y_max = match chart {
        Chart::SuccessRate => 1.0,
        Chart::Latency => {
            let m = report.groups.iter().map(value).fold(0.0, f64::max);
            if m > 0.0 {
                m * 1.1
            } else {
                1.0
            }
        }
    };
    let y = |v: f64| top + plot_h * (1.0 - v / y_max);
    let (title, axis) = match chart {
        Chart::SuccessRate => ("Success rate by category", "S"),
        Chart::Latency => ("Mean latency by category", "T (s)"),
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{width}" height="{height}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="18" text-anchor="middle" font-size="14">{title}</text>"#,
        left + plot_w / 2.0
    );
    for i in 0..=5 {
        let v = y_max * f64::from(i) / 5.0;
        let yy = y(v);
        let _ = writeln!(
            svg,
            r##"<line x1="{left}" y1="{yy:.2}" x2="{:.2}" y2="{yy:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{v:.2}</text>"##,
            left + plot_w,
            left - 6.0,
            yy + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{:.2}" transform="rotate(-90 16 {:.2})" text-anchor="middle">{axis}</text>"#,
        top + plot_h / 2.0,
        top + plot_h / 2.0
    );
    let group_w = plot_w / categories.len().max(1) as f64;
    let bar_w = group_w * 0.8 / strategies.len().max(1) as f64;
    for (ci, cat) in categories.iter().enumerate() {
        let gx = left + group_w * ci as f64 + group_w * 0.1;
        for (si, strategy) in strategies.iter().enumerate() {
            if let Some(g) = report.group(*strategy, *cat) {
                let v = value(g);
                let _ = writeln!(
                    svg,
                    r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"><title>{} {}: {v:.3}</title></rect>"#,
                    gx + bar_w * si as f64,
                    y(v),
                    bar_w,
                    (y(0.0) - y(v)).max(0.0),
                    COLORS[si % COLORS.len()],
                    strategy,
                    escape(cat.label()),
                );
            }
        }
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            left + group_w * (ci as f64 + 0.5),
            top + plot_h + 18.0,
            escape(cat.label())
        );
    }
    for (si, o) in report.overall.iter().enumerate() {
        let v = match chart {
            Chart::SuccessRate => o.success_rate,
            Chart::Latency => o.mean_latency_s,
        };
        let color = COLORS[si % COLORS.len()];
        let _ = writeln!(
            svg,
            r#"<line x1="{left}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="1.5" stroke-dasharray="6 4"/>"#,
            y(v),
            left + plot_w,
            y(v)
        );
        let ly = top + 20.0 * si as f64;
        let lx = left + plot_w + 16.0;
        let _ = writeln!(
            svg,
            r#"<rect x="{lx}" y="{ly}" width="12" height="12" fill="{color}"/><text x="{}" y="{}">{} (mean {v:.2})</text>"#,
            lx + 18.0,
            ly + 10.0,
            o.strategy
        );
    }
    let _ = writeln!(
        svg,
        r##"<line x1="{left}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#000"/>"##,
        y(0.0),
        left + plot_w,
        y(0.0)
    );
    svg.push_str("</svg>\n");
    svg
}
