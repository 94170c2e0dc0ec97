//! Minimal PDB reader/writer for backbone-level model files.
//!
//! Only ATOM records are consumed; the first chain of the first MODEL block
//! is read and everything else (HETATM, waters, alternate locations other
//! than blank/'A') is skipped. Residues without a CA atom are dropped.

use crate::error::{Error, Result};
use crate::structure::{AminoAcid, Point3, Residue, StructureModel};

/// One parsed ATOM record, kept close to the raw column content.
#[derive(Debug, Clone)]
pub struct AtomRecord {
    pub atom_name: String,
    pub alt_loc: char,
    pub res_name: String,
    pub chain_id: char,
    pub residue_seq: u32,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub element: String,
}

fn field(line: &str, lo: usize, hi: usize) -> &str {
    let bytes = line.as_bytes();
    let hi = hi.min(bytes.len());
    if lo >= hi {
        return "";
    }
    // PDB is plain ASCII; slicing bytes keeps column arithmetic honest.
    std::str::from_utf8(&bytes[lo..hi]).unwrap_or("")
}

fn parse_coord(line: &str, lo: usize, hi: usize, lineno: usize, what: &str) -> Result<f64> {
    let raw = field(line, lo, hi).trim();
    let v: f64 = raw.parse().map_err(|_| Error::PdbParse {
        line: lineno,
        msg: format!("malformed {what} coordinate field {raw:?}"),
    })?;
    if !v.is_finite() {
        return Err(Error::PdbParse { line: lineno, msg: format!("non-finite {what} coordinate") });
    }
    Ok(v)
}

fn parse_atom_line(line: &str, lineno: usize) -> Result<AtomRecord> {
    if line.len() < 54 {
        return Err(Error::PdbParse { line: lineno, msg: "ATOM record shorter than coordinate columns".into() });
    }
    let atom_name = field(line, 12, 16).trim().to_string();
    if atom_name.is_empty() {
        return Err(Error::PdbParse { line: lineno, msg: "empty atom name".into() });
    }
    let alt_loc = field(line, 16, 17).chars().next().unwrap_or(' ');
    let res_name = field(line, 17, 20).trim().to_string();
    let chain_id = field(line, 21, 22).chars().next().unwrap_or(' ');
    let seq_raw = field(line, 22, 26).trim();
    let residue_seq: i64 = seq_raw
        .parse()
        .map_err(|_| Error::PdbParse { line: lineno, msg: format!("malformed residue number {seq_raw:?}") })?;
    if residue_seq < 1 {
        return Err(Error::PdbParse { line: lineno, msg: format!("residue number {residue_seq} < 1") });
    }
    let x = parse_coord(line, 30, 38, lineno, "x")?;
    let y = parse_coord(line, 38, 46, lineno, "y")?;
    let z = parse_coord(line, 46, 54, lineno, "z")?;
    let element = field(line, 76, 78).trim().to_string();
    Ok(AtomRecord {
        atom_name,
        alt_loc,
        res_name,
        chain_id,
        residue_seq: residue_seq as u32,
        x,
        y,
        z,
        element,
    })
}

/// Parse PDB-format text into a structural model.
///
/// `model_id` is caller-supplied (normally the file stem); the target id is
/// left empty and stamped later by pool assembly.
pub fn parse_pdb(text: &str, model_id: &str) -> Result<StructureModel> {
    // Working residue: (seq, res_name, ca, n, c, o, first-seen line).
    struct Partial {
        seq: u32,
        res_name: String,
        ca: Option<Point3>,
        n: Option<Point3>,
        c: Option<Point3>,
        o: Option<Point3>,
        lineno: usize,
    }

    let mut chain: Option<char> = None;
    let mut partials: Vec<Partial> = Vec::new();

    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.starts_with("ENDMDL") {
            break; // first MODEL block only
        }
        if !line.starts_with("ATOM") {
            continue;
        }
        let atom = parse_atom_line(line, lineno)?;
        if atom.alt_loc != ' ' && atom.alt_loc != 'A' {
            continue;
        }
        match chain {
            None => chain = Some(atom.chain_id),
            Some(c) if c != atom.chain_id => continue, // first chain only
            _ => {}
        }
        let pos = atom.residue_seq;
        let cur = match partials.last_mut() {
            Some(p) if p.seq == pos => p,
            _ => {
                partials.push(Partial {
                    seq: pos,
                    res_name: atom.res_name.clone(),
                    ca: None,
                    n: None,
                    c: None,
                    o: None,
                    lineno,
                });
                partials.last_mut().unwrap()
            }
        };
        let coord = [atom.x, atom.y, atom.z];
        // First occurrence wins; later duplicates (e.g. further altlocs) are ignored.
        match atom.atom_name.as_str() {
            "CA" => cur.ca.get_or_insert(coord),
            "N" => cur.n.get_or_insert(coord),
            "C" => cur.c.get_or_insert(coord),
            "O" => cur.o.get_or_insert(coord),
            _ => continue,
        };
    }

    let mut residues = Vec::new();
    for p in partials {
        let Some(ca) = p.ca else { continue }; // documented skip: no CA, no residue
        let aa = AminoAcid::from_three_letter(&p.res_name).ok_or_else(|| Error::PdbParse {
            line: p.lineno,
            msg: format!("unsupported residue code {:?}", p.res_name),
        })?;
        residues.push(Residue { seq_index: p.seq, aa, ca, n: p.n, c: p.c, o: p.o });
    }
    if residues.is_empty() {
        return Err(Error::EmptyModel);
    }
    StructureModel::new(model_id, "", residues)
}

fn push_atom(out: &mut String, serial: usize, name: &str, res: &Residue, pos: Point3) {
    // Columns follow the fixed PDB layout; 4-character atom names start at
    // column 13, shorter ones at column 14.
    let padded = if name.len() >= 4 { name.to_string() } else { format!(" {name:<3}") };
    let element = &name[..1];
    out.push_str(&format!(
        "ATOM  {serial:>5} {padded}{alt}{res_name:<3} {chain}{seq:>4}{icode}   {x:>8.3}{y:>8.3}{z:>8.3}{occ:>6.2}{b:>6.2}          {element:>2}\n",
        serial = serial,
        padded = padded,
        alt = ' ',
        res_name = res.aa.three_letter(),
        chain = 'A',
        seq = res.seq_index,
        icode = ' ',
        x = pos[0],
        y = pos[1],
        z = pos[2],
        occ = 1.0,
        b = 0.0,
        element = element,
    ));
}

/// Serialize a model back to PDB text (3 decimal places, chain A).
pub fn write_pdb(model: &StructureModel) -> String {
    let mut out = String::new();
    let mut serial = 0;
    for res in &model.residues {
        for (name, pos) in [("N", res.n), ("CA", Some(res.ca)), ("C", res.c), ("O", res.o)] {
            if let Some(p) = pos {
                serial += 1;
                push_atom(&mut out, serial, name, res, p);
            }
        }
    }
    out.push_str("TER\nEND\n");
    out
}
