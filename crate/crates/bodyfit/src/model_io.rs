//! Binary container for statistical models.
//!
//! Layout, all little-endian: magic `BMDL`, format version u32, then a header
//! of counts (vertices, bones, modes, faces, landmarks), then the payload in
//! fixed order: mean coordinates, basis columns, eigenvalues, faces, labels,
//! joints, skinning weights, posable indices, landmarks. Floats are stored as
//! raw IEEE bits, so a save and load round trip is exact. Short files and
//! unknown versions fail with a corruption error, and the loaded model is
//! re-validated before it is returned.

use std::path::Path;

use nalgebra::{DMatrix, DVector, Point3};

use crate::error::{Error, Result};
use crate::mesh::BodyPart;
use crate::model::{Joint, StatModel};

const MAGIC: &[u8; 4] = b"BMDL";
const VERSION: u32 = 1;

pub fn model_to_bytes(model: &StatModel) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    for count in [
        model.vertex_count(),
        model.bone_count(),
        model.mode_count(),
        model.faces.len(),
        model.landmarks.len(),
    ] {
        out.extend_from_slice(&(count as u64).to_le_bytes());
    }
    for &x in model.mean.iter() {
        out.extend_from_slice(&x.to_le_bytes());
    }
    for col in model.basis.column_iter() {
        for &x in col.iter() {
            out.extend_from_slice(&x.to_le_bytes());
        }
    }
    for &x in model.eigenvalues.iter() {
        out.extend_from_slice(&x.to_le_bytes());
    }
    for f in &model.faces {
        for &v in f {
            out.extend_from_slice(&(v as u64).to_le_bytes());
        }
    }
    for &label in &model.labels {
        out.push(label.index() as u8);
    }
    for joint in &model.joints {
        write_str(&mut out, &joint.name);
        let parent = joint.parent.map_or(-1i64, |p| p as i64);
        out.extend_from_slice(&parent.to_le_bytes());
        for &x in joint.position.coords.iter() {
            out.extend_from_slice(&x.to_le_bytes());
        }
        out.extend_from_slice(&joint.sign.to_le_bytes());
    }
    for i in 0..model.weights.nrows() {
        for j in 0..model.weights.ncols() {
            out.extend_from_slice(&model.weights[(i, j)].to_le_bytes());
        }
    }
    out.extend_from_slice(&(model.posable.len() as u64).to_le_bytes());
    for &p in &model.posable {
        out.extend_from_slice(&(p as u64).to_le_bytes());
    }
    for (name, index) in &model.landmarks {
        write_str(&mut out, name);
        out.extend_from_slice(&(*index as u64).to_le_bytes());
    }
    out
}

fn write_str(out: &mut Vec<u8>, s: &str) {
    out.extend_from_slice(&(s.len() as u64).to_le_bytes());
    out.extend_from_slice(s.as_bytes());
}

struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.data.len());
        match end {
            Some(end) => {
                let slice = &self.data[self.pos..end];
                self.pos = end;
                Ok(slice)
            }
            None => Err(Error::Corrupt(format!(
                "model file ends early at byte {}",
                self.data.len()
            ))),
        }
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn i64(&mut self) -> Result<i64> {
        Ok(i64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn count(&mut self) -> Result<usize> {
        let v = self.u64()?;
        usize::try_from(v).map_err(|_| Error::Corrupt(format!("count {v} overflows")))
    }

    fn string(&mut self) -> Result<String> {
        let len = self.count()?;
        if len > 1 << 16 {
            return Err(Error::Corrupt(format!("string length {len} is absurd")));
        }
        let bytes = self.take(len)?;
        String::from_utf8(bytes.to_vec())
            .map_err(|_| Error::Corrupt("string is not valid UTF-8".into()))
    }
}

pub fn model_from_bytes(data: &[u8]) -> Result<StatModel> {
    let mut r = Reader { data, pos: 0 };
    if r.take(4)? != MAGIC {
        return Err(Error::Corrupt("not a model file (bad magic)".into()));
    }
    let version = u32::from_le_bytes(r.take(4)?.try_into().unwrap());
    if version != VERSION {
        return Err(Error::Corrupt(format!(
            "unsupported model format version {version} (expected {VERSION})"
        )));
    }
    let n = r.count()?;
    let bones = r.count()?;
    let modes = r.count()?;
    let face_count = r.count()?;
    let landmark_count = r.count()?;
    // Guard the big allocations against garbage headers.
    let payload = (3usize.saturating_mul(n).saturating_mul(modes + 1))
        .saturating_add(modes)
        .saturating_add(n.saturating_mul(bones));
    if payload.saturating_mul(8) > data.len().saturating_mul(2) + (1 << 20) {
        return Err(Error::Corrupt("header counts exceed the file size".into()));
    }
    let mut mean = DVector::zeros(3 * n);
    for i in 0..3 * n {
        mean[i] = r.f64()?;
    }
    let mut basis = DMatrix::zeros(3 * n, modes);
    for k in 0..modes {
        for i in 0..3 * n {
            basis[(i, k)] = r.f64()?;
        }
    }
    let mut eigenvalues = DVector::zeros(modes);
    for k in 0..modes {
        eigenvalues[k] = r.f64()?;
    }
    let mut faces = Vec::with_capacity(face_count);
    for _ in 0..face_count {
        faces.push([r.count()?, r.count()?, r.count()?]);
    }
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let idx = r.take(1)?[0] as usize;
        let part = BodyPart::ALL
            .get(idx)
            .copied()
            .ok_or_else(|| Error::Corrupt(format!("label index {idx} out of range")))?;
        labels.push(part);
    }
    let mut joints = Vec::with_capacity(bones);
    for _ in 0..bones {
        let name = r.string()?;
        let parent = match r.i64()? {
            -1 => None,
            p if p >= 0 => Some(p as usize),
            p => return Err(Error::Corrupt(format!("joint parent {p} is invalid"))),
        };
        let position = Point3::new(r.f64()?, r.f64()?, r.f64()?);
        let sign = r.f64()?;
        joints.push(Joint {
            name,
            parent,
            position,
            sign,
        });
    }
    let mut weights = DMatrix::zeros(n, bones);
    for i in 0..n {
        for j in 0..bones {
            weights[(i, j)] = r.f64()?;
        }
    }
    let posable_count = r.count()?;
    let mut posable = Vec::with_capacity(posable_count.min(16));
    for _ in 0..posable_count {
        posable.push(r.count()?);
    }
    let mut landmarks = Vec::with_capacity(landmark_count);
    for _ in 0..landmark_count {
        let name = r.string()?;
        landmarks.push((name, r.count()?));
    }
    if r.pos != data.len() {
        return Err(Error::Corrupt(format!(
            "{} trailing bytes after the model payload",
            data.len() - r.pos
        )));
    }
    let model = StatModel {
        mean,
        basis,
        eigenvalues,
        faces,
        labels,
        joints,
        weights,
        posable,
        landmarks,
    };
    model.validate()?;
    Ok(model)
}

pub fn save_model(model: &StatModel, path: &Path) -> Result<()> {
    std::fs::write(path, model_to_bytes(model))?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<StatModel> {
    let data = std::fs::read(path)?;
    model_from_bytes(&data)
}
