fn main() -> std::process::ExitCode {
    conelab::cli::main()
}
