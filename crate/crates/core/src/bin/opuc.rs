fn main() -> std::process::ExitCode {
    opuc::cli::run(std::env::args_os())
}
