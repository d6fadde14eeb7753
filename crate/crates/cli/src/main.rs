fn main() {
    let budget = std::env::var("PNHS_BUDGET").ok();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = pnhs_cli::run(std::env::args_os(), budget.as_deref(), &mut stdout.lock(), &mut stderr.lock());
    std::process::exit(code);
}
