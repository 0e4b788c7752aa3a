//! On-disk cache of class lists keyed by `(d, N, beta)`. Unreadable or
//! inconsistent entries are recomputed and overwritten.

use std::path::{Path, PathBuf};

use mulhecke_core::quadforms::{class_representatives, ClassList};
use mulhecke_core::Result;

pub struct ClassCache {
    dir: Option<PathBuf>,
}

impl ClassCache {
    pub fn new(dir: Option<&Path>) -> Self {
        Self {
            dir: dir.map(Path::to_path_buf),
        }
    }

    fn path(&self, d: i64, level: u64, beta: i64) -> Option<PathBuf> {
        self.dir
            .as_ref()
            .map(|dir| dir.join("classes").join(format!("d{d}_N{level}_b{beta}.json")))
    }

    fn load(path: &Path, d: i64, level: u64, beta: i64) -> Option<ClassList> {
        let text = std::fs::read_to_string(path).ok()?;
        let list: ClassList = serde_json::from_str(&text).ok()?;
        let consistent = list.d == d
            && list.level == level
            && list.beta == beta
            && list.character.is_none()
            && list.reps.iter().all(|r| r.form.disc() == -d && r.form.a % level as i64 == 0);
        consistent.then_some(list)
    }

    pub fn get(&self, d: i64, level: u64, beta: i64) -> Result<ClassList> {
        let path = self.path(d, level, beta);
        if let Some(list) = path.as_deref().and_then(|p| Self::load(p, d, level, beta)) {
            return Ok(list);
        }
        let list = class_representatives(d, level, beta)?;
        if let Some(path) = path {
            // a failed write only costs a recomputation next time
            if let Some(parent) = path.parent() {
                let _ = std::fs::create_dir_all(parent);
            }
            if let Ok(text) = serde_json::to_string(&list) {
                let _ = std::fs::write(&path, text);
            }
        }
        Ok(list)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corrupted_entries_are_rebuilt() {
        let dir = tempfile::tempdir().unwrap();
        let cache = ClassCache::new(Some(dir.path()));
        let cold = cache.get(52, 7, 2).unwrap();
        let path = cache.path(52, 7, 2).unwrap();
        assert!(path.exists());
        assert_eq!(cache.get(52, 7, 2).unwrap(), cold);
        std::fs::write(&path, "{not json").unwrap();
        assert_eq!(cache.get(52, 7, 2).unwrap(), cold);
        std::fs::write(&path, r#"{"d":52,"N":7,"beta":2,"reps":[{"form":[1,0,13],"chi":1,"omega":1}]}"#).unwrap();
        assert_eq!(cache.get(52, 7, 2).unwrap(), cold);
        assert_eq!(ClassCache::load(&path, 52, 7, 2).unwrap(), cold);
    }
}
