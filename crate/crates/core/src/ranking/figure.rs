use std::fmt::Write as _;

use super::{AgreementMatrix, PairAgreement};

const CELL: usize = 24;
const MARGIN: usize = 48;
const LIGHT: &str = "#f2e35c";
const DARK: &str = "#2a2440";
const TIED: &str = "#9b9b9b";
const HIGHLIGHT: &str = "#19a64a";

/// Heatmap of an agreement matrix plus its plain-text grid.
///
/// Grid symbols: `.` preserved, `X` flipped, `=` tied. The highlighted
/// configuration (typically the reference best) is marked with `*` in the
/// grid and outlined in the image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgreementFigure {
    pub svg: String,
    pub grid: String,
    pub dark_cells: usize,
}

fn symbol(cell: PairAgreement) -> char {
    match cell {
        PairAgreement::Preserved => '.',
        PairAgreement::Flipped => 'X',
        PairAgreement::Tied => '=',
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

pub fn render_agreement_figure(
    matrix: &AgreementMatrix,
    highlight: Option<usize>,
    title: &str,
) -> AgreementFigure {
    let n = matrix.size();
    let side = MARGIN + n * CELL + 8;
    let mut svg = String::new();
    let mut dark_cells = 0;
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{side}" height="{}" viewBox="0 0 {side} {}">"#,
        side + 20,
        side + 20
    );
    let _ = writeln!(
        svg,
        r#"<text x="4" y="14" font-family="monospace" font-size="12">{}</text>"#,
        xml_escape(title)
    );
    for (i, id) in matrix.config_ids().iter().enumerate() {
        let offset = MARGIN + i * CELL + CELL / 2;
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-family="monospace" font-size="10" text-anchor="end">{}</text>"#,
            MARGIN - 4,
            offset + 20 + 4,
            xml_escape(id)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{offset}" y="{}" font-family="monospace" font-size="10" text-anchor="middle">{}</text>"#,
            MARGIN + 20 - 6,
            xml_escape(id)
        );
    }
    for i in 0..n {
        for j in 0..n {
            let cell = matrix.get(i, j);
            let fill = match cell {
                PairAgreement::Preserved => LIGHT,
                PairAgreement::Flipped => {
                    dark_cells += 1;
                    DARK
                }
                PairAgreement::Tied => TIED,
            };
            let _ = writeln!(
                svg,
                r##"<rect x="{}" y="{}" width="{CELL}" height="{CELL}" fill="{fill}" stroke="#ffffff" stroke-width="1"/>"##,
                MARGIN + j * CELL,
                MARGIN + 20 + i * CELL
            );
        }
    }
    if let Some(h) = highlight.filter(|&h| h < n) {
        let _ = writeln!(
            svg,
            r#"<rect x="{}" y="{}" width="{}" height="{CELL}" fill="none" stroke="{HIGHLIGHT}" stroke-width="3"/>"#,
            MARGIN,
            MARGIN + 20 + h * CELL,
            n * CELL
        );
        let _ = writeln!(
            svg,
            r#"<rect x="{}" y="{}" width="{CELL}" height="{}" fill="none" stroke="{HIGHLIGHT}" stroke-width="3"/>"#,
            MARGIN + h * CELL,
            MARGIN + 20,
            n * CELL
        );
    }
    svg.push_str("</svg>\n");

    let width = matrix.config_ids().iter().map(String::len).max().unwrap_or(0);
    let mut grid = String::new();
    let _ = writeln!(grid, "# {title}");
    let _ = writeln!(grid, "# . preserved  X flipped  = tied  * highlighted");
    for i in 0..n {
        let mark = if highlight == Some(i) { '*' } else { ' ' };
        let row: String = (0..n).map(|j| symbol(matrix.get(i, j))).collect();
        let _ = writeln!(grid, "{mark}{:>width$} {row}", matrix.config_ids()[i]);
    }
    let _ = writeln!(grid, "# flipped cells: {dark_cells}");

    AgreementFigure { svg, grid, dark_cells }
}
