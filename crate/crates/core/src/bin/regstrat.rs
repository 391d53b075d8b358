fn main() -> std::process::ExitCode {
    regstrat::cli::main()
}
