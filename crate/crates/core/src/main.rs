fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("OVCP_LOG", "warn")).init();
    std::process::exit(ovcp::cli::run(std::env::args_os()));
}
