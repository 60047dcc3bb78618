//! Append-only session snapshots on local disk: one JSON file per revision
//! under `<dir>/<session>/`, newest revision wins on load.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::pipeline::Session;

#[derive(Debug, Clone)]
pub struct SnapshotStore {
    dir: PathBuf,
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io { path: path.to_path_buf(), source }
}

impl SnapshotStore {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir).map_err(io(&dir))?;
        Ok(SnapshotStore { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn save(&self, s: &Session) -> Result<PathBuf> {
        let d = self.dir.join(&s.id);
        std::fs::create_dir_all(&d).map_err(io(&d))?;
        let path = d.join(format!("{:08}.json", s.revision));
        let tmp = d.join(format!(".{:08}.tmp", s.revision));
        std::fs::write(&tmp, serde_json::to_vec(s)?).map_err(io(&tmp))?;
        std::fs::rename(&tmp, &path).map_err(io(&path))?;
        Ok(path)
    }

    /// Latest snapshot of every session in the store.
    pub fn load_all(&self) -> Result<Vec<Session>> {
        let mut out = Vec::new();
        let mut dirs: Vec<PathBuf> = std::fs::read_dir(&self.dir)
            .map_err(io(&self.dir))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_dir())
            .collect();
        dirs.sort();
        for d in dirs {
            let mut files: Vec<PathBuf> = std::fs::read_dir(&d)
                .map_err(io(&d))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "json"))
                .collect();
            files.sort();
            if let Some(last) = files.last() {
                let bytes = std::fs::read(last).map_err(io(last))?;
                out.push(serde_json::from_slice(&bytes)?);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;

    #[test]
    fn latest_revision_is_loaded() {
        let dir = tempfile::tempdir().unwrap();
        let store = SnapshotStore::open(dir.path()).unwrap();
        let cfg = synth::random_ward(1, 2, 7);
        let w = synth::wishes(&cfg, 1, 0);
        let mut s = Session::new("abc", cfg, w).unwrap();
        store.save(&s).unwrap();
        s.revision = 7;
        s.intake_warnings.push(crate::io::Warning::field("x".into(), "y", vec![]));
        store.save(&s).unwrap();
        let all = store.load_all().unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].revision, 7);
        assert_eq!(all[0].intake_warnings[0].field, "x");
    }
}
