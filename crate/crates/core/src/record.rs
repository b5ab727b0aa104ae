use crate::attributes::AttributeMap;
use crate::mesh::{Aabb, Mesh};
use crate::ObjectClass;

/// One building object as it moves through the enrichment tools.
#[derive(Debug, Clone)]
pub struct ObjectRecord {
    pub id: String,
    pub mesh: Mesh,
    aabb: Aabb,
    pub class: Option<ObjectClass>,
    pub confidence: Option<f64>,
    pub attributes: Option<AttributeMap>,
}

impl ObjectRecord {
    pub fn new(id: impl Into<String>, mesh: Mesh) -> Self {
        let aabb = mesh.aabb();
        ObjectRecord {
            id: id.into(),
            mesh,
            aabb,
            class: None,
            confidence: None,
            attributes: None,
        }
    }

    pub fn with_class(mut self, class: ObjectClass) -> Self {
        self.class = Some(class);
        self
    }

    pub fn aabb(&self) -> &Aabb {
        &self.aabb
    }
}
