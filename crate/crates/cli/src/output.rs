use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use bandfill::{Result, RunConfig, VERSION};
use serde::Serialize;

/// Output sink: a file when a path is given, stdout otherwise.
pub fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

#[derive(Serialize)]
pub struct Envelope<'a, T: Serialize> {
    pub toolkit_version: &'static str,
    pub config: &'a RunConfig,
    #[serde(flatten)]
    pub body: T,
}

pub fn write_json<T: Serialize>(out: &mut dyn Write, config: &RunConfig, body: T) -> Result<()> {
    let env = Envelope {
        toolkit_version: VERSION,
        config,
        body,
    };
    serde_json::to_writer_pretty(&mut *out, &env)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

/// Comment lines carrying the version and config ahead of CSV data.
pub fn write_csv_preamble(out: &mut dyn Write, config: &RunConfig) -> Result<()> {
    writeln!(out, "# bandfill {VERSION}")?;
    writeln!(out, "# config: {}", serde_json::to_string(config)?)?;
    Ok(())
}
