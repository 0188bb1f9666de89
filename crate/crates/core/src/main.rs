fn main() -> std::process::ExitCode {
    lpdpl::cli::main()
}
