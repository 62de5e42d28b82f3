use std::path::{Path, PathBuf};

use pdlab::config::RunConfig;
use pdlab::corpus::InputSpec;
use pdlab::io::read_grid_function;
use pdlab::symbol::{parse_symbol_spec, SymbolRef, SymbolSpec};
use pdlab::{GridFunction, GridSpec, LpFrame, PdError};
use serde_json::Value;

use crate::{InputArgs, SymbolArg};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("no such file: {}", .0.display())]
    MissingFile(PathBuf),
    #[error("gate failed: {0}")]
    Gate(String),
    #[error(transparent)]
    Core(#[from] PdError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::MissingFile(_) => 2,
            CliError::Gate(_) => 1,
            CliError::Core(e) => match e {
                PdError::InvalidGrid(_)
                | PdError::InvalidParameter(_)
                | PdError::Parse { .. }
                | PdError::ShapeMismatch(_)
                | PdError::SizeGuard { .. } => 2,
                _ => 1,
            },
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Core(e.into())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(e.into())
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn require_file(path: &Path) -> CliResult<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::MissingFile(path.to_path_buf()))
    }
}

/// Resolved configuration for one invocation.
pub struct Context {
    pub config: RunConfig,
}

fn set_key(root: &mut Value, key: &str, raw: &str) -> CliResult<()> {
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let parts: Vec<&str> = key.split('.').collect();
    let mut node = root;
    for (i, part) in parts.iter().enumerate() {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| CliError::Usage(format!("`{key}` does not name a configuration field")))?;
        if i + 1 == parts.len() {
            obj.insert((*part).to_string(), value);
            return Ok(());
        }
        node = obj.entry(*part).or_insert_with(|| Value::Object(Default::default()));
        if node.is_null() {
            *node = Value::Object(Default::default());
        }
    }
    Ok(())
}

impl Context {
    pub fn load(path: Option<&Path>, set: &[String]) -> CliResult<Self> {
        let config = match path {
            Some(p) => {
                require_file(p)?;
                RunConfig::load(p)?
            }
            None => RunConfig::default(),
        };
        let config = if set.is_empty() {
            config
        } else {
            let mut v = serde_json::to_value(&config)?;
            for item in set {
                let (k, raw) = item
                    .split_once('=')
                    .ok_or_else(|| CliError::Usage(format!("--set expects KEY=VALUE, got `{item}`")))?;
                set_key(&mut v, k.trim(), raw.trim())?;
            }
            let c: RunConfig =
                serde_json::from_value(v).map_err(|e| CliError::Usage(format!("invalid --set override: {e}")))?;
            c.validate()?;
            c
        };
        Ok(Self { config })
    }

    pub fn grid(&self) -> CliResult<GridSpec> {
        Ok(self.config.grid_spec()?)
    }

    pub fn frame(&self) -> CliResult<LpFrame> {
        Ok(self.config.lp_frame()?)
    }

    pub fn input(&self, args: &InputArgs) -> CliResult<GridFunction> {
        match (&args.input, &args.mode) {
            (Some(p), _) => {
                require_file(p)?;
                Ok(read_grid_function(p)?)
            }
            (None, Some(m)) => Ok(InputSpec::parse(m)?.build(self.grid()?)?),
            (None, None) => Err(CliError::Usage("an input is required: pass --input FILE or --mode SPEC".into())),
        }
    }

    pub fn symbol_spec(&self, arg: &SymbolArg) -> CliResult<SymbolSpec> {
        let s = arg
            .symbol
            .as_deref()
            .or(self.config.symbol.as_deref())
            .ok_or_else(|| CliError::Usage("a symbol is required: pass --symbol SPEC or set `symbol` in the config".into()))?;
        let spec = parse_symbol_spec(s)?;
        match &spec {
            SymbolSpec::Elementary { file } | SymbolSpec::Table { file } => require_file(file)?,
            _ => {}
        }
        Ok(spec)
    }

    pub fn symbol(&self, arg: &SymbolArg, grid: &GridSpec) -> CliResult<SymbolRef> {
        Ok(self.symbol_spec(arg)?.build(grid, &self.frame()?)?)
    }
}

/// Writes `text` to `out`, or to stdout without a path.
pub fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(p, text)?;
        }
        None => println!("{}", text.trim_end()),
    }
    Ok(())
}
