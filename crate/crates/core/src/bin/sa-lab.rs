fn main() -> std::process::ExitCode {
    sa_lab::cli::main()
}
