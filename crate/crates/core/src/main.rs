fn main() -> std::process::ExitCode {
    anapt::cli::main_from(std::env::args_os())
}
