fn main() -> std::process::ExitCode {
    std::process::ExitCode::from(eo_transducer::cli::run() as u8)
}
