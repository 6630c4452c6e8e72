//! Text formats for weights, glyph datasets and feature vectors.
//!
//! Weights: an optional `conv` block followed by a required `dense` block.
//!
//! ```text
//! conv filters=5 height=3 width=3 stride=2 input=5x5 pool=2x2 pool_stride=2
//! <one line of height·width values per filter, row-major>
//! dense rows=5 cols=5
//! <one line of cols values per row>
//! ```
//!
//! Glyphs: `glyphs height=H width=W`, then `label row1 row2 ...` with each
//! row a string of `0`/`1`.
//!
//! Features: `features n=N classes=K`, then `label v1 ... vN`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use ndarray::{Array2, Array3};

use super::{ConvLayer, ConvStage, LabeledImage, NetworkWeights, PoolSpec};
use crate::error::{Error, Result};
use crate::text::{content_lines, field, fmt_real, header, number, real};

const CANONICAL_GLYPHS: &str = include_str!("../../data/glyphs.txt");

/// The five-class 5×5 digit fixture.
pub fn canonical_glyphs() -> Vec<LabeledImage> {
    parse_glyphs(CANONICAL_GLYPHS).expect("bundled glyph file is valid")
}

impl NetworkWeights {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Some(stage) = &self.conv {
            let (d, h, w) = stage.conv.filters.dim();
            let p = stage.pool;
            writeln!(
                out,
                "conv filters={d} height={h} width={w} stride={} input={}x{} pool={}x{} pool_stride={}",
                stage.conv.stride, stage.input.0, stage.input.1, p.height, p.width, p.stride
            )
            .unwrap();
            for f in 0..d {
                push_row(
                    &mut out,
                    stage.conv.filters.index_axis(ndarray::Axis(0), f).iter(),
                );
            }
        }
        let (r, c) = self.dense.dim();
        writeln!(out, "dense rows={r} cols={c}").unwrap();
        for row in self.dense.rows() {
            push_row(&mut out, row.iter());
        }
        out
    }

    pub fn parse(text: &str) -> Result<NetworkWeights> {
        let lines: Vec<(usize, &str)> = content_lines(text).collect();
        let mut pos = 0;
        let mut conv = None;
        let mut dense = None;
        while pos < lines.len() {
            let (line_no, line) = lines[pos];
            pos += 1;
            match line.split_whitespace().next() {
                Some("conv") if conv.is_some() => {
                    return Err(Error::parse(line_no, "repeated conv block"))
                }
                Some("conv") if dense.is_some() => {
                    return Err(Error::parse(
                        line_no,
                        "conv block must precede the dense block",
                    ))
                }
                Some("conv") => {
                    let h = header(line_no, line, "conv")?;
                    let d: usize = field(&h, "filters", line_no)?;
                    let fh: usize = field(&h, "height", line_no)?;
                    let fw: usize = field(&h, "width", line_no)?;
                    let stride: usize = field(&h, "stride", line_no)?;
                    let input = pair(&h, "input", line_no)?;
                    let (ph, pw) = pair(&h, "pool", line_no)?;
                    let pool_stride: usize = field(&h, "pool_stride", line_no)?;
                    let values = block(&lines, &mut pos, line_no, d, fh * fw)?;
                    let filters = Array3::from_shape_vec((d, fh, fw), values).expect("sized");
                    conv = Some(ConvStage {
                        conv: ConvLayer { filters, stride },
                        input,
                        pool: PoolSpec {
                            height: ph,
                            width: pw,
                            stride: pool_stride,
                        },
                    });
                }
                Some("dense") if dense.is_some() => {
                    return Err(Error::parse(line_no, "repeated dense block"))
                }
                Some("dense") => {
                    let h = header(line_no, line, "dense")?;
                    let rows: usize = field(&h, "rows", line_no)?;
                    let cols: usize = field(&h, "cols", line_no)?;
                    let values = block(&lines, &mut pos, line_no, rows, cols)?;
                    dense = Some(Array2::from_shape_vec((rows, cols), values).expect("sized"));
                }
                _ => {
                    return Err(Error::parse(
                        line_no,
                        format!("expected a `conv` or `dense` block, found {line:?}"),
                    ))
                }
            }
        }
        let last = lines.last().map_or(1, |l| l.0);
        let dense = dense.ok_or_else(|| Error::parse(last, "missing dense block"))?;
        let weights = NetworkWeights { conv, dense };
        weights.validate()?;
        Ok(weights)
    }
}

fn push_row<'a>(out: &mut String, values: impl Iterator<Item = &'a f64>) {
    let row: Vec<String> = values.map(|&v| fmt_real(v)).collect();
    out.push_str(&row.join(" "));
    out.push('\n');
}

/// Parses `key=AxB`.
fn pair(
    fields: &std::collections::HashMap<&str, &str>,
    key: &str,
    line_no: usize,
) -> Result<(usize, usize)> {
    let raw: String = field(fields, key, line_no)?;
    let (a, b) = raw
        .split_once('x')
        .ok_or_else(|| Error::parse(line_no, format!("expected `{key}=AxB`, found {raw:?}")))?;
    Ok((number(a, line_no, key)?, number(b, line_no, key)?))
}

/// Reads `rows` lines of `cols` reals starting at `lines[*pos]`.
fn block(
    lines: &[(usize, &str)],
    pos: &mut usize,
    header_line: usize,
    rows: usize,
    cols: usize,
) -> Result<Vec<f64>> {
    let mut values = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        let (line_no, line) = *lines.get(*pos).ok_or_else(|| {
            Error::parse(header_line, format!("block ends after {r} of {rows} rows"))
        })?;
        *pos += 1;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != cols {
            return Err(Error::parse(
                line_no,
                format!("expected {cols} values, found {}", tokens.len()),
            ));
        }
        for t in tokens {
            values.push(real(t, line_no)?);
        }
    }
    Ok(values)
}

pub fn read_weights(path: impl AsRef<Path>) -> Result<NetworkWeights> {
    let path = path.as_ref();
    NetworkWeights::parse(&fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
}

pub fn write_weights(path: impl AsRef<Path>, weights: &NetworkWeights) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, weights.to_text()).map_err(|e| Error::io(path, e))
}

pub fn parse_glyphs(text: &str) -> Result<Vec<LabeledImage>> {
    let mut lines = content_lines(text);
    let (line_no, first) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "empty glyph file"))?;
    let h = header(line_no, first, "glyphs")?;
    let height: usize = field(&h, "height", line_no)?;
    let width: usize = field(&h, "width", line_no)?;
    let mut images = Vec::new();
    for (line_no, line) in lines {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != height + 1 {
            return Err(Error::parse(
                line_no,
                format!(
                    "expected a label and {height} rows, found {} tokens",
                    tokens.len()
                ),
            ));
        }
        let label: usize = number(tokens[0], line_no, "label")?;
        let mut pixels = Vec::with_capacity(height * width);
        for row in &tokens[1..] {
            if row.len() != width {
                return Err(Error::parse(
                    line_no,
                    format!("row {row:?} is not {width} wide"),
                ));
            }
            for c in row.chars() {
                pixels.push(match c {
                    '0' => 0.0,
                    '1' => 1.0,
                    _ => return Err(Error::parse(line_no, format!("invalid pixel {c:?}"))),
                });
            }
        }
        let pixels = Array2::from_shape_vec((height, width), pixels).expect("sized");
        images.push(LabeledImage { pixels, label });
    }
    Ok(images)
}

/// Writes binary images (pixels at or above 0.5 become `1`).
pub fn format_glyphs(images: &[LabeledImage]) -> Result<String> {
    let (height, width) = images.first().map_or((0, 0), |i| i.pixels.dim());
    let mut out = format!("glyphs height={height} width={width}\n");
    for image in images {
        if image.pixels.dim() != (height, width) {
            return Err(Error::Dimension("glyphs differ in size".into()));
        }
        write!(out, "{}", image.label).unwrap();
        for row in image.pixels.rows() {
            out.push(' ');
            out.extend(row.iter().map(|&p| if p >= 0.5 { '1' } else { '0' }));
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn read_glyphs(path: impl AsRef<Path>) -> Result<Vec<LabeledImage>> {
    let path = path.as_ref();
    parse_glyphs(&fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
}

/// A labelled feature vector, as exported for dense-only networks.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub label: usize,
    pub values: Vec<f64>,
}

/// Parses a feature file; returns the class count and the vectors.
pub fn parse_features(text: &str) -> Result<(usize, Vec<FeatureVector>)> {
    let mut lines = content_lines(text);
    let (line_no, first) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "empty feature file"))?;
    let h = header(line_no, first, "features")?;
    let n: usize = field(&h, "n", line_no)?;
    let classes: usize = field(&h, "classes", line_no)?;
    let mut out = Vec::new();
    for (line_no, line) in lines {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != n + 1 {
            return Err(Error::parse(
                line_no,
                format!(
                    "expected a label and {n} values, found {} tokens",
                    tokens.len()
                ),
            ));
        }
        let label: usize = number(tokens[0], line_no, "label")?;
        if label >= classes {
            return Err(Error::parse(
                line_no,
                format!("label {label} with {classes} classes"),
            ));
        }
        let values = tokens[1..]
            .iter()
            .map(|t| real(t, line_no))
            .collect::<Result<Vec<_>>>()?;
        out.push(FeatureVector { label, values });
    }
    Ok((classes, out))
}

pub fn read_features(path: impl AsRef<Path>) -> Result<(usize, Vec<FeatureVector>)> {
    let path = path.as_ref();
    parse_features(&fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
}
