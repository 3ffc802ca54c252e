fn main() -> std::process::ExitCode {
    giqyp::cli::main_with_args(std::env::args_os())
}
