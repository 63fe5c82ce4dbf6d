fn main() -> std::process::ExitCode {
    sxmeans::cli::main_with(std::env::args_os())
}
