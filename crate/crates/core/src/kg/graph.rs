use std::collections::{BTreeSet, HashMap};
use std::io::{BufRead, Write};

use super::{KgError, Result, SCHEMA_SEPARATOR};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EntityId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RelationId(pub u32);

/// Directed multigraph of `(head, relation, tail)` triples with an
/// `(entity, relation) -> tails` index. Tails are kept sorted by name so
/// walks are deterministic.
#[derive(Debug, Clone, Default)]
pub struct Graph {
    entities: Vec<String>,
    entity_ids: HashMap<String, EntityId>,
    relations: Vec<String>,
    relation_ids: HashMap<String, RelationId>,
    triples: BTreeSet<(EntityId, RelationId, EntityId)>,
    adjacency: HashMap<(EntityId, RelationId), Vec<EntityId>>,
    out_relations: HashMap<EntityId, BTreeSet<RelationId>>,
}

/// Counts collected while parsing a triples file.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub lines: usize,
    pub comments: usize,
    pub triples: usize,
    pub duplicates: usize,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Build from `(head, relation, tail)` names. Duplicates collapse.
    pub fn from_triples<I, S>(triples: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, S, S)>,
        S: AsRef<str>,
    {
        let mut g = Graph::new();
        for (i, (h, r, t)) in triples.into_iter().enumerate() {
            g.insert(h.as_ref(), r.as_ref(), t.as_ref(), i + 1)?;
        }
        g.finish();
        Ok(g)
    }

    fn entity(&mut self, name: &str) -> EntityId {
        if let Some(&id) = self.entity_ids.get(name) {
            return id;
        }
        let id = EntityId(self.entities.len() as u32);
        self.entities.push(name.to_string());
        self.entity_ids.insert(name.to_string(), id);
        id
    }

    fn relation(&mut self, name: &str) -> RelationId {
        if let Some(&id) = self.relation_ids.get(name) {
            return id;
        }
        let id = RelationId(self.relations.len() as u32);
        self.relations.push(name.to_string());
        self.relation_ids.insert(name.to_string(), id);
        id
    }

    /// Returns false when the triple was already present.
    fn insert(&mut self, head: &str, relation: &str, tail: &str, line: usize) -> Result<bool> {
        for (field, value) in [("head", head), ("relation", relation), ("tail", tail)] {
            if value.is_empty() {
                return Err(KgError::Malformed { line, reason: format!("empty {field} field") });
            }
        }
        if relation.contains(SCHEMA_SEPARATOR) {
            return Err(KgError::ReservedSeparator { line, name: relation.to_string() });
        }
        let (h, r, t) = (self.entity(head), self.relation(relation), self.entity(tail));
        if !self.triples.insert((h, r, t)) {
            return Ok(false);
        }
        self.adjacency.entry((h, r)).or_default().push(t);
        self.out_relations.entry(h).or_default().insert(r);
        Ok(true)
    }

    fn finish(&mut self) {
        let names = &self.entities;
        for tails in self.adjacency.values_mut() {
            tails.sort_by(|a, b| names[a.0 as usize].cmp(&names[b.0 as usize]));
        }
    }

    pub fn num_entities(&self) -> usize {
        self.entities.len()
    }

    pub fn num_relations(&self) -> usize {
        self.relations.len()
    }

    pub fn num_triples(&self) -> usize {
        self.triples.len()
    }

    /// Entity names in first-seen order.
    pub fn entities(&self) -> &[String] {
        &self.entities
    }

    /// Relation names in first-seen order.
    pub fn relations(&self) -> &[String] {
        &self.relations
    }

    pub fn entity_id(&self, name: &str) -> Option<EntityId> {
        self.entity_ids.get(name).copied()
    }

    pub fn relation_id(&self, name: &str) -> Option<RelationId> {
        self.relation_ids.get(name).copied()
    }

    pub fn entity_name(&self, id: EntityId) -> &str {
        &self.entities[id.0 as usize]
    }

    pub fn relation_name(&self, id: RelationId) -> &str {
        &self.relations[id.0 as usize]
    }

    pub fn contains_entity(&self, name: &str) -> bool {
        self.entity_ids.contains_key(name)
    }

    pub fn has_triple(&self, head: &str, relation: &str, tail: &str) -> bool {
        match (self.entity_id(head), self.relation_id(relation), self.entity_id(tail)) {
            (Some(h), Some(r), Some(t)) => self.triples.contains(&(h, r, t)),
            _ => false,
        }
    }

    pub fn triple_ids(&self) -> impl Iterator<Item = (EntityId, RelationId, EntityId)> + '_ {
        self.triples.iter().copied()
    }

    /// All triples as names, ordered by internal id.
    pub fn triples(&self) -> impl Iterator<Item = (&str, &str, &str)> + '_ {
        self.triples.iter().map(|&(h, r, t)| (self.entity_name(h), self.relation_name(r), self.entity_name(t)))
    }

    /// Tails reachable from `head` over `relation`, sorted by name.
    pub fn tails(&self, head: EntityId, relation: RelationId) -> &[EntityId] {
        self.adjacency.get(&(head, relation)).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Relations leaving `head`, sorted by name.
    pub fn out_relations(&self, head: &str) -> Vec<String> {
        let mut out: Vec<String> = self
            .entity_id(head)
            .and_then(|h| self.out_relations.get(&h))
            .map(|rs| rs.iter().map(|&r| self.relation_name(r).to_string()).collect())
            .unwrap_or_default();
        out.sort();
        out
    }

    /// Write the triple set as TSV, sorted by `(head, relation, tail)` name.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let mut rows: Vec<_> = self.triples().collect();
        rows.sort();
        for (h, r, t) in rows {
            writeln!(w, "{h}\t{r}\t{t}")?;
        }
        w.flush()
    }
}

/// Parse a UTF-8 TSV triples stream: `head TAB relation TAB tail` per line,
/// `#` starts a comment line, blank lines are skipped, a trailing CR is
/// tolerated.
pub fn load_triples<R: BufRead>(source: R) -> Result<(Graph, LoadReport)> {
    let mut g = Graph::new();
    let mut report = LoadReport::default();
    for (i, line) in source.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| match e.kind() {
            std::io::ErrorKind::InvalidData => KgError::Malformed { line: lineno, reason: "invalid UTF-8".into() },
            _ => KgError::Io(e),
        })?;
        report.lines += 1;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.starts_with('#') {
            report.comments += 1;
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(KgError::Malformed { line: lineno, reason: format!("expected 3 tab-separated fields, found {}", fields.len()) });
        }
        if g.insert(fields[0], fields[1], fields[2], lineno)? {
            report.triples += 1;
        } else {
            report.duplicates += 1;
        }
    }
    g.finish();
    Ok((g, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_line() {
        let (g, rep) = load_triples("a\tr\tb\n".as_bytes()).unwrap();
        assert_eq!((g.num_entities(), g.num_relations(), g.num_triples()), (2, 1, 1));
        assert_eq!(rep.triples, 1);
    }

    #[test]
    fn duplicates_collapse() {
        let (g, rep) = load_triples("a\tr\tb\n# note\na\tr\tb\n".as_bytes()).unwrap();
        assert_eq!(g.num_triples(), 1);
        assert_eq!((rep.duplicates, rep.comments), (1, 1));
    }

    #[test]
    fn two_fields_is_line_one_error() {
        match load_triples("a\tr\n".as_bytes()) {
            Err(KgError::Malformed { line, .. }) => assert_eq!(line, 1),
            other => panic!("unexpected {other:?}"),
        }
        match load_triples("a\tr\tb\nx\ty\tz\tw\n".as_bytes()) {
            Err(KgError::Malformed { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_file_is_empty_graph() {
        let (g, _) = load_triples("".as_bytes()).unwrap();
        assert_eq!(g.num_triples(), 0);
    }

    #[test]
    fn reserved_separator_rejected() {
        assert!(matches!(load_triples("a\tr->s\tb\n".as_bytes()), Err(KgError::ReservedSeparator { line: 1, .. })));
    }

    #[test]
    fn adjacency_is_sorted_and_complete() {
        let (g, _) = load_triples("a\tr\tz\na\tr\tb\na\ts\tc\nb\tr\ta\n".as_bytes()).unwrap();
        let (a, r) = (g.entity_id("a").unwrap(), g.relation_id("r").unwrap());
        let names: Vec<&str> = g.tails(a, r).iter().map(|&t| g.entity_name(t)).collect();
        assert_eq!(names, ["b", "z"]);
        assert_eq!(g.out_relations("a"), ["r", "s"]);
        // rebuilding triples from the index gives back the triple set
        let mut rebuilt = BTreeSet::new();
        for h in 0..g.num_entities() as u32 {
            for rel in 0..g.num_relations() as u32 {
                for &t in g.tails(EntityId(h), RelationId(rel)) {
                    rebuilt.insert((EntityId(h), RelationId(rel), t));
                }
            }
        }
        assert_eq!(rebuilt, g.triple_ids().collect());
    }

    #[test]
    fn crlf_tolerated() {
        let (g, _) = load_triples("a\tr\tb\r\n".as_bytes()).unwrap();
        assert!(g.has_triple("a", "r", "b"));
    }
}
